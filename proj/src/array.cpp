#include "nfarray/array.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "nfarray/constants.hpp"

namespace nfa {

namespace {

constexpr cplx I(0.0, 1.0);

template <class Mat>
void renormalize(Scaled<Mat>& s) {
    const double mx = s.matrix.cwiseAbs().maxCoeff();
    if (mx > 1e100 || (mx > 0 && mx < 1e-100)) {
        s.matrix /= mx;
        s.log_scale += std::log(mx);
    }
}

template <class Mat>
Scaled<Mat> multiply(const Scaled<Mat>& a, const Scaled<Mat>& b) {
    Scaled<Mat> c{a.matrix * b.matrix, a.log_scale + b.log_scale};
    renormalize(c);
    return c;
}

template <class Mat>
Scaled<Mat> product_power(const Mat& M, const Mat& F, long N) {
    if (N < 1) throw std::invalid_argument("atom count N must be >= 1");
    Scaled<Mat> base{M * F, 0.0};
    Scaled<Mat> acc{Mat::Identity(), 0.0};
    for (long e = N - 1; e > 0; e >>= 1) {
        if (e & 1) acc = multiply(acc, base);
        if (e > 1) base = multiply(base, base);
    }
    return multiply(acc, Scaled<Mat>{M, 0.0});
}

// asinh accurate to full relative precision for small arguments.
cplx asinh_small(cplx w) {
    if (std::abs(w) > 1e-2) return std::asinh(w);
    const cplx w2 = w * w;
    return w * (1.0 + w2 * (-1.0 / 6 + w2 * (3.0 / 40 + w2 * (-15.0 / 336 + w2 * (105.0 / 3456)))));
}

double parity_sign(long k) { return (k % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

void ArrayScenario::validate() const {
    if (N < 1) throw std::invalid_argument("array: N must be >= 1");
    if (!(Lambda > 0)) throw std::invalid_argument("array: period Lambda must be positive");
}

double bragg_period(const ModeSolution& mode, int order) {
    if (order < 1) throw std::invalid_argument("Bragg order must be >= 1");
    return order * phys::pi / mode.beta;
}

double beta_at_detuning(const ModeSolution& mode, double delta) {
    return mode.beta + delta / mode.v_group;
}

Eigen::Matrix2cd free_propagator(double beta, double Lambda) {
    if (Lambda < 0) throw std::invalid_argument("propagation length must be non-negative");
    Eigen::Matrix2cd F = Eigen::Matrix2cd::Zero();
    F(0, 0) = std::exp(I * beta * Lambda);
    F(1, 1) = std::exp(-I * beta * Lambda);
    return F;
}

Eigen::Matrix4cd free_propagator4(double beta, double Lambda) {
    if (Lambda < 0) throw std::invalid_argument("propagation length must be non-negative");
    Eigen::Matrix4cd F = Eigen::Matrix4cd::Zero();
    F(0, 0) = F(1, 1) = std::exp(I * beta * Lambda);
    F(2, 2) = F(3, 3) = std::exp(-I * beta * Lambda);
    return F;
}

Scaled<Eigen::Matrix2cd> total_transfer_product(const Eigen::Matrix2cd& M, const Eigen::Matrix2cd& F,
                                                long N) {
    return product_power(M, F, N);
}

Scaled<Eigen::Matrix4cd> total_transfer_product(const Eigen::Matrix4cd& M, const Eigen::Matrix4cd& F,
                                                long N) {
    return product_power(M, F, N);
}

Eigen::Matrix4cd inhomogeneous_product(const std::vector<Eigen::Matrix4cd>& Ms,
                                       const std::vector<Eigen::Matrix4cd>& Fs) {
    if (Ms.empty() || Fs.size() + 1 != Ms.size())
        throw std::invalid_argument("inhomogeneous_product: need N transfer and N-1 propagators");
    Eigen::Matrix4cd W = Ms[0];
    for (std::size_t j = 1; j < Ms.size(); ++j) W = Ms[j] * Fs[j - 1] * W;
    return W;
}

cplx transfer_theta(const Eigen::Matrix2cd& M, double beta, double Lambda) {
    const cplx e = std::exp(I * beta * Lambda);
    return acosh_branch(0.5 * (M(0, 0) * e + M(1, 1) / e));
}

cplx acosh_branch(cplx D) {
    // Work near whichever of +1, -1 is closer so theta stays accurate when small.
    const bool flip = D.real() < 0;
    const cplx Dn = flip ? -D : D;
    cplx v = 2.0 * asinh_small(std::sqrt((Dn - 1.0) / 2.0));
    if (v.real() < 0 || (v.real() == 0 && v.imag() < 0)) v = -v;
    return flip ? v + I * phys::pi : v;
}

SinhRatios sinh_ratios(cplx theta, long N) {
    if (N < 1) throw std::invalid_argument("atom count N must be >= 1");
    SinhRatios s;
    s.theta = theta;
    const long k = std::lround(theta.imag() / phys::pi);
    cplx v = theta - I * (phys::pi * k);
    s.k = k;
    s.vartheta = v;
    const double sgnN1 = parity_sign(k * ((N - 1) % 2));
    const double sgnN2 = parity_sign(k * (N % 2));  // (-1)^{k(N-2)}
    if (std::abs(std::sinh(v)) < 1e-14) {
        s.degenerate = true;
        s.sN = double(N) * sgnN1;
        s.sNm1 = double(N - 1) * sgnN2;
        s.log_factor = 0.0;
        return s;
    }
    if (v.real() < 0) v = -v;  // the sinh ratios are even in theta
    const cplx a1 = -num::expm1(-2.0 * v);
    const cplx aN = -num::expm1(-2.0 * double(N) * v);
    const cplx aNm1 = -num::expm1(-2.0 * double(N - 1) * v);
    s.sN = sgnN1 * aN / a1;
    s.sNm1 = sgnN2 * std::exp(-v) * aNm1 / a1;
    s.log_factor = double(N - 1) * v;
    return s;
}

ClosedTransfer total_transfer_closed(const Eigen::Matrix2cd& M, double beta, double Lambda, long N) {
    ClosedTransfer out;
    out.theta = transfer_theta(M, beta, Lambda);
    const SinhRatios s = sinh_ratios(out.theta, N);
    const cplx e = std::exp(I * beta * Lambda);
    const cplx phase = std::exp(I * s.log_factor.imag());
    Eigen::Matrix2cd W;
    W(0, 0) = M(0, 0) * s.sN - s.sNm1 / e;
    W(1, 1) = M(1, 1) * s.sN - e * s.sNm1;
    W(1, 0) = M(1, 0) * s.sN;
    W(0, 1) = M(0, 1) * s.sN;
    out.W.matrix = W * phase;
    out.W.log_scale = s.log_factor.real();
    return out;
}

ArrayResponse response_from_W(const Scaled<Eigen::Matrix2cd>& W) {
    ArrayResponse r;
    const cplx w22 = W.matrix(1, 1), w21 = W.matrix(1, 0);
    if (std::abs(w22) * std::exp(std::min(W.log_scale, 700.0)) < 1e-300) {
        if (w22 == 0.0) throw std::domain_error("W22 vanishes; reflection undefined");
        r.T_N = 0;
    } else {
        r.T_N = std::exp(-W.log_scale) / w22;
    }
    r.R_N = -w21 / w22;
    r.reflectivity = std::norm(r.R_N);
    r.transmittivity = std::norm(r.T_N);
    r.P_tot = r.reflectivity + r.transmittivity;
    return r;
}

ArrayResponse array_response(const Eigen::Matrix2cd& M, double beta, double Lambda, long N) {
    const cplx R = reflection_of(M), T = transmission_of(M);
    const cplx e = std::exp(I * beta * Lambda);
    ArrayResponse r;
    r.theta = transfer_theta(M, beta, Lambda);
    const SinhRatios s = sinh_ratios(r.theta, N);
    const cplx den = s.sN - T * e * s.sNm1;
    r.R_N = R * s.sN / den;
    r.T_N = T * std::exp(-s.log_factor) / den;
    r.reflectivity = std::norm(r.R_N);
    r.transmittivity = std::norm(r.T_N);
    r.P_tot = r.reflectivity + r.transmittivity;
    return r;
}

std::pair<cplx, cplx> recurrence_step(cplx RN, cplx TN, cplx R, cplx T, double beta, double Lambda) {
    const cplx e = std::exp(I * beta * Lambda);
    const cplx den = 1.0 - RN * R * e * e;
    return {RN + TN * TN * R * e * e / den, TN * T * e / den};
}

CircularResponse circular_response(const ArrayResponse& x, const ArrayResponse& y) {
    CircularResponse c;
    c.x = x;
    c.y = y;
    c.P_forward_same = std::norm(x.T_N + y.T_N) / 4;
    c.P_forward_opposite = std::norm(x.T_N - y.T_N) / 4;
    c.P_backward_same = std::norm(x.R_N + y.R_N) / 4;
    c.P_backward_opposite = std::norm(x.R_N - y.R_N) / 4;
    c.P_tot = c.P_forward_same + c.P_forward_opposite + c.P_backward_same + c.P_backward_opposite;
    return c;
}

BraggResult bragg_response(const PolarizationChannel& ch, long N, int order) {
    if (N < 1) throw std::invalid_argument("atom count N must be >= 1");
    BraggResult b;
    const double tsign = parity_sign(((N + 1) % 2) * (order % 2));
    if (ch.xi == Channel::Y) {
        b.vartheta = 0;
        const cplx den = 1.0 - double(N - 1) * ch.R;
        b.R_N = double(N) * ch.R / den;
        b.T_N = tsign * ch.T / den;
        return b;
    }
    b.vartheta = transfer_theta(ch.M, 0.0, 0.0);
    const SinhRatios s = sinh_ratios(b.vartheta, N);
    const cplx den = s.sN - ch.T * s.sNm1;
    b.R_N = ch.R * s.sN / den;
    b.T_N = tsign * ch.T * std::exp(-s.log_factor) / den;
    return b;
}

cplx bragg_r_infinity(const PolarizationChannel& ch) {
    const cplx v = transfer_theta(ch.M, 0.0, 0.0);
    return ch.R / (1.0 - ch.T * std::exp(-v));
}

double bragg_r_infinity_profile(double er, double ez) { return -(er - ez) / (er + ez); }

BraggResult bragg_y_rates(double g1d, double gamma, double delta, long N, int order) {
    BraggResult b;
    const cplx den = cplx(gamma, -2 * delta) + double(N - 1) * g1d;
    const double tsign = parity_sign(((N + 1) % 2) * (order % 2));
    b.R_N = -double(N) * g1d / den;
    b.T_N = tsign * (cplx(gamma, -2 * delta) - g1d) / den;
    return b;
}

std::array<cplx, 4> input_output_4mode(const Eigen::Matrix4cd& W, const std::array<cplx, 4>& in) {
    const cplx Q = W(2, 2) * W(3, 3) - W(2, 3) * W(3, 2);
    if (std::abs(Q) < 1e-300) throw SingularInputOutputError("input-output solve: Q vanishes");
    const cplx a3 = W(2, 0) * in[0] + W(2, 1) * in[1] - in[2];
    const cplx a4 = W(3, 0) * in[0] + W(3, 1) * in[1] - in[3];
    std::array<cplx, 4> out;
    out[2] = (W(2, 3) * a4 - W(3, 3) * a3) / Q;
    out[3] = (W(3, 2) * a3 - W(2, 2) * a4) / Q;
    out[0] = W(0, 0) * in[0] + W(0, 1) * in[1] + W(0, 2) * out[2] + W(0, 3) * out[3];
    out[1] = W(1, 0) * in[0] + W(1, 1) * in[1] + W(1, 2) * out[2] + W(1, 3) * out[3];
    return out;
}

Eigen::Matrix4cd homogenized_transfer(const Eigen::Matrix4cd& S, double beta, double Lambda, double L) {
    Eigen::Matrix4cd B = Eigen::Matrix4cd::Zero();
    B(0, 0) = B(1, 1) = beta;
    B(2, 2) = B(3, 3) = -beta;
    const Eigen::Matrix4cd G = (I * B - S / Lambda) * L;
    return G.exp();
}

Eigen::Matrix2cd homogenized_transfer(const Eigen::Matrix2cd& S, double beta, double Lambda, double L) {
    Eigen::Matrix2cd B = Eigen::Matrix2cd::Zero();
    B(0, 0) = beta;
    B(1, 1) = -beta;
    const Eigen::Matrix2cd G = (I * B - S / Lambda) * L;
    return G.exp();
}

}  // namespace nfa
