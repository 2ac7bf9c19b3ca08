#include "nfarray/radiation.hpp"

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "nfarray/constants.hpp"

namespace nfa {

using num::bessel_j;
using num::bessel_j_prime;
using num::bessel_y;
using num::bessel_y_prime;

namespace {

constexpr cplx I(0.0, 1.0);

// Bessel data at the interface needed to build one (beta, m) mode.
struct InterfaceBessel {
    double Jh, Jhp;      // J_m(ha), J_m'(ha)
    double FJ, FJp;      // J_m(qa), J_m'(qa)
    double FY, FYp;      // Y_m(qa), Y_m'(qa)
};

struct ModeGeometry {
    double k, beta, h, q, a, n1s, n2s, omega;
};

// Fills everything except the stored Hankel coefficients' physical scale.
void build_mode(const ModeGeometry& g, int m, int l, const InterfaceBessel& b, RadiationMode& out,
                double& amplitude_scale) {
    const double cV = m * g.k * g.beta / (g.a * g.h * g.h * g.q * g.q) * (g.n2s - g.n1s) * b.Jh;
    double VJ = cV * b.FJ, VY = cV * b.FY;
    double MJ = b.Jhp * b.FJ / g.h - b.Jh * b.FJp / g.q;
    double MY = b.Jhp * b.FY / g.h - b.Jh * b.FYp / g.q;
    double LJ = g.n1s * b.Jhp * b.FJ / g.h - g.n2s * b.Jh * b.FJp / g.q;
    double LY = g.n1s * b.Jhp * b.FY / g.h - g.n2s * b.Jh * b.FYp / g.q;

    // Common rescaling; every normalized quantity is invariant under it.
    const double s = std::max({std::abs(VJ), std::abs(VY), std::abs(MJ), std::abs(MY),
                               std::abs(LJ), std::abs(LY)});
    VJ /= s; VY /= s; MJ /= s; MY /= s; LJ /= s; LY /= s;

    // Quantities of the first kind: H^(1)* = J - iY.
    const cplx V1(VJ, -VY), M1(MJ, -MY), L1(LJ, -LY);
    const double eta = phys::eps0 * phys::c *
                       std::sqrt((g.n2s * std::norm(V1) + std::norm(L1)) /
                                 (std::norm(V1) + g.n2s * std::norm(M1)));
    const cplx B = double(l) * I * eta;  // with A = 1
    const cplx PJ = LJ + I * phys::mu0 * phys::c * B * VJ;
    const cplx PY = LY + I * phys::mu0 * phys::c * B * VY;
    const cplx QJ = I * phys::eps0 * phys::c * VJ - B * MJ;
    const cplx QY = I * phys::eps0 * phys::c * VY - B * MY;
    const cplx K = I * phys::pi * g.q * g.q * g.a / (4 * g.n2s);
    const cplx Kp = I * phys::pi * g.q * g.q * g.a / 4.0;

    const cplx C1 = -K * (PJ - I * PY), C2 = K * (PJ + I * PY);
    const cplx D1 = Kp * (QJ - I * QY), D2 = -Kp * (QJ + I * QY);
    const double N = 8 * phys::pi * g.omega / (g.q * g.q) *
                     (g.n2s * std::norm(C1) + phys::mu0 / phys::eps0 * std::norm(D1));
    const double norm = 1.0 / std::sqrt(N);

    out.omega = g.omega;
    out.beta = g.beta;
    out.h = g.h;
    out.q = g.q;
    out.m = m;
    out.l = l;
    out.eta = eta;
    out.C1 = C1 * norm;
    out.C2 = C2 * norm;
    out.D1 = D1 * norm;
    out.D2 = D2 * norm;
    out.cJ = 2.0 * I * K * PY * norm;
    out.cY = -2.0 * I * K * PJ * norm;
    out.dJ = -2.0 * I * Kp * QY * norm;
    out.dY = 2.0 * I * Kp * QJ * norm;
    amplitude_scale = norm / s;
    out.A = amplitude_scale;
    out.B = B * amplitude_scale;
}

ModeGeometry geometry(const FiberSpec& fb, double omega, double beta) {
    const double k = omega / phys::c;
    if (!(std::abs(beta) < k * fb.n2))
        throw std::domain_error("radiation mode requires |beta| < k n2");
    ModeGeometry g;
    g.k = k;
    g.beta = beta;
    g.n1s = fb.n1 * fb.n1;
    g.n2s = fb.n2 * fb.n2;
    g.h = std::sqrt(g.n1s * k * k - beta * beta);
    g.q = std::sqrt(g.n2s * k * k - beta * beta);
    g.a = fb.radius;
    g.omega = omega;
    return g;
}

// Exterior field from the J/Y coefficients and Bessel values at qr.
CylVec exterior_field(const RadiationMode& md, double r, double J, double Jp, double Y, double Yp) {
    const cplx Z = md.cJ * J + md.cY * Y;
    const cplx Zp = md.cJ * Jp + md.cY * Yp;
    const cplx W = md.dJ * J + md.dY * Y;
    const cplx Wp = md.dJ * Jp + md.dY * Yp;
    const double wmu = md.omega * phys::mu0, q2 = md.q * md.q;
    CylVec e;
    e.r = I / q2 * (md.beta * md.q * Zp + I * double(md.m) * wmu / r * W);
    e.phi = I / q2 * (I * double(md.m) * md.beta / r * Z - md.q * wmu * Wp);
    e.z = Z;
    return e;
}

}  // namespace

RadiationMode make_radiation_mode(const FiberSpec& fb, double omega, double beta, int m, int l) {
    if (l != 1 && l != -1) throw std::invalid_argument("radiation polarization l must be +1 or -1");
    const ModeGeometry g = geometry(fb, omega, beta);
    const double ha = g.h * g.a, qa = g.q * g.a;
    InterfaceBessel b{bessel_j(m, ha), bessel_j_prime(m, ha), bessel_j(m, qa),
                      bessel_j_prime(m, qa), bessel_y(m, qa), bessel_y_prime(m, qa)};
    RadiationMode md;
    double scale = 0;
    build_mode(g, m, l, b, md, scale);
    return md;
}

CylVec radiation_profile(const RadiationMode& md, const FiberSpec& fb, double r) {
    if (r < 0) throw std::invalid_argument("radiation_profile: r must be non-negative");
    if (r < fb.radius) {
        const double hr = md.h * r, h2 = md.h * md.h, wmu = md.omega * phys::mu0;
        const double J = bessel_j(md.m, hr), Jp = bessel_j_prime(md.m, hr);
        CylVec e;
        e.r = I / h2 * (md.beta * md.h * md.A * Jp + I * double(md.m) * wmu / r * md.B * J);
        e.phi = I / h2 * (I * double(md.m) * md.beta / r * md.A * J - md.h * wmu * md.B * Jp);
        e.z = md.A * J;
        return e;
    }
    const double qr = md.q * r;
    return exterior_field(md, r, bessel_j(md.m, qr), bessel_j_prime(md.m, qr), bessel_y(md.m, qr),
                          bessel_y_prime(md.m, qr));
}

CylVec radiation_profile_hankel(const RadiationMode& md, const FiberSpec&, double r) {
    const double qr = md.q * r, q2 = md.q * md.q, wmu = md.omega * phys::mu0;
    const cplx H1 = num::hankel(1, md.m, qr), H2 = num::hankel(2, md.m, qr);
    const cplx H1p = num::hankel_prime(1, md.m, qr), H2p = num::hankel_prime(2, md.m, qr);
    const cplx CH = md.C1 * H1 + md.C2 * H2, CHp = md.C1 * H1p + md.C2 * H2p;
    const cplx DH = md.D1 * H1 + md.D2 * H2, DHp = md.D1 * H1p + md.D2 * H2p;
    CylVec e;
    e.r = I / q2 * (md.beta * md.q * CHp + I * double(md.m) * wmu / r * DH);
    e.phi = I / q2 * (I * double(md.m) * md.beta / r * CH - md.q * wmu * DHp);
    e.z = CH;
    return e;
}

cplx radiation_overlap(const FiberSpec& fb, const RadiationMode& a, const RadiationMode& b) {
    const double n2s = fb.n2 * fb.n2;
    const cplx sum = n2s * (a.C1 * std::conj(b.C1) + a.C2 * std::conj(b.C2)) +
                     phys::mu0 / phys::eps0 * (a.D1 * std::conj(b.D1) + a.D2 * std::conj(b.D2));
    return 0.5 * 8 * phys::pi * a.omega / (a.q * a.q) * sum;
}

std::array<cplx, 4> hankel_coefficients_literal(const FiberSpec& fb, double omega, double beta,
                                                int m, cplx A, cplx B) {
    const ModeGeometry g = geometry(fb, omega, beta);
    const double ha = g.h * g.a, qa = g.q * g.a;
    const double Jh = bessel_j(m, ha), Jhp = bessel_j_prime(m, ha);
    std::array<cplx, 4> out{};
    for (int j = 1; j <= 2; ++j) {
        const cplx Hs = std::conj(num::hankel(j, m, qa));
        const cplx Hsp = std::conj(num::hankel_prime(j, m, qa));
        const cplx V = m * g.k * g.beta / (g.a * g.h * g.h * g.q * g.q) * (g.n2s - g.n1s) * Jh * Hs;
        const cplx M = Jhp * Hs / g.h - Jh * Hsp / g.q;
        const cplx L = g.n1s * Jhp * Hs / g.h - g.n2s * Jh * Hsp / g.q;
        const double sgn = (j == 1) ? -1.0 : 1.0;  // (-1)^j
        out[j - 1] = sgn * I * phys::pi * g.q * g.q * g.a / (4 * g.n2s) *
                     (A * L + I * phys::mu0 * phys::c * B * V);
        out[j + 1] = -sgn * I * phys::pi * g.q * g.q * g.a / 4.0 *
                     (I * phys::eps0 * phys::c * A * V - B * M);
    }
    return out;
}

RadiationTensor radiation_tensor_fixed(const FiberSpec& fb, double omega, double r, int panels,
                                       const RadiationOptions& opt) {
    if (!(r > fb.radius)) throw std::domain_error("radiation rates need the atom outside the fiber");
    const double k = omega / phys::c;
    const int mmax = opt.m_max;
    const auto& rule = num::gauss_legendre(opt.gl_order);
    std::vector<Eigen::Matrix3cd> per_m(2 * mmax + 1, Eigen::Matrix3cd::Zero());
    std::vector<double> Jh(mmax + 2), FJ(mmax + 2), FY(mmax + 2), RJ(mmax + 2), RY(mmax + 2);
    auto deriv = [](const std::vector<double>& F, int n) {
        const double lower = n == 0 ? -F[1] : F[n - 1];
        return 0.5 * (lower - F[n + 1]);
    };

    const double width = phys::pi / panels;
    for (int p = 0; p < panels; ++p) {
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double t = -0.5 * phys::pi + (p + 0.5) * width + 0.5 * width * rule.nodes[i];
            const double w = 0.5 * width * rule.weights[i];
            const double beta = k * fb.n2 * std::sin(t);
            const ModeGeometry g = geometry(fb, omega, beta);
            const double ha = g.h * g.a, qa = g.q * g.a, qr = g.q * r;
            const double dbeta = w * g.q;

            // Orders whose Y_m(qa) would overflow contribute ~J_m(qr)^2, which
            // underflows long before; stop there.
            int mlim = mmax;
            for (int n = 2; n <= mmax + 1; ++n)
                if (qa < n && std::lgamma(double(n)) + n * std::log(2.0 / qa) > 650.0) {
                    mlim = n - 2;
                    break;
                }
            for (int n = 0; n <= mlim + 1; ++n) {
                Jh[n] = bessel_j(n, ha);
                FJ[n] = bessel_j(n, qa);
                FY[n] = bessel_y(n, qa);
                RJ[n] = bessel_j(n, qr);
                RY[n] = bessel_y(n, qr);
            }
            for (int am = 0; am <= mlim; ++am) {
                const double jh = Jh[am], jhp = deriv(Jh, am);
                const double fj = FJ[am], fjp = deriv(FJ, am), fy = FY[am], fyp = deriv(FY, am);
                const double rj = RJ[am], rjp = deriv(RJ, am), ry = RY[am], ryp = deriv(RY, am);
                for (int sgn = (am == 0 ? 1 : -1); sgn <= 1; sgn += 2) {
                    const int m = sgn * am;
                    const double par = (sgn < 0 && am % 2) ? -1.0 : 1.0;
                    const InterfaceBessel b{par * jh, par * jhp, par * fj, par * fjp, par * fy, par * fyp};
                    for (int l = -1; l <= 1; l += 2) {
                        RadiationMode md;
                        double scale = 0;
                        build_mode(g, m, l, b, md, scale);
                        const CylVec e = exterior_field(md, r, par * rj, par * rjp, par * ry, par * ryp);
                        const auto sph = spherical_components(e, 0.0);
                        Eigen::Vector3cd v(sph[0], sph[1], sph[2]);
                        per_m[m + mmax].noalias() += dbeta * (v * v.adjoint());
                    }
                }
            }
        }
    }

    RadiationTensor out;
    out.panels = panels;
    out.gamma = per_m[mmax];
    int small = 0;
    for (int am = 1; am <= mmax; ++am) {
        const Eigen::Matrix3cd c = per_m[mmax + am] + per_m[mmax - am];
        out.gamma += c;
        out.m_used = am;
        if (c.trace().real() < opt.m_truncation_tol * out.gamma.trace().real()) {
            if (++small >= 2) break;
        } else {
            small = 0;
        }
    }
    return out;
}

RadiationTensor radiation_tensor(const FiberSpec& fb, double omega, double r,
                                 const RadiationOptions& opt) {
    int panels = opt.initial_panels;
    RadiationTensor prev = radiation_tensor_fixed(fb, omega, r, panels, opt);
    while (panels < opt.max_panels) {
        panels *= 2;
        RadiationTensor next = radiation_tensor_fixed(fb, omega, r, panels, opt);
        const double a = prev.gamma.trace().real(), b = next.gamma.trace().real();
        prev = next;
        if (std::abs(b - a) < opt.rel_change * std::abs(b)) break;
    }
    return prev;
}

RadiationRates gamma_rad(const FiberSpec& fb, const HyperfineTransition& t, double r, double phi,
                         const RadiationOptions& opt) {
    if (phi != 0.0) throw std::invalid_argument("gamma_rad: only the phi = 0 geometry is supported");
    RadiationRates out;
    out.tensor = radiation_tensor(fb, t.omega0, r, opt);
    const DipoleTable d(t);
    const int ne = d.n_e(), ng = d.n_g();
    const double pref = t.omega0 / (2 * phys::eps0 * phys::hbar);
    out.per_pair = Eigen::MatrixXcd::Zero(ne, ne);
    for (int ie = 0; ie < ne; ++ie)
        for (int je = 0; je < ne; ++je)
            for (int ig = 0; ig < ng; ++ig) {
                const double d1 = d(ie, ig), d2 = d(je, ig);
                if (d1 == 0.0 || d2 == 0.0) continue;
                const int q1 = d.q(ie, ig), q2 = d.q(je, ig);
                const double sign = ((q1 + q2) % 2 == 0) ? 1.0 : -1.0;
                out.per_pair(ie, je) += pref * sign * d1 * d2 * out.tensor.gamma(1 - q1, 1 - q2);
            }
    out.averaged = out.per_pair.trace().real() / ne;
    return out;
}

RadiationRates gamma_rad_cached(const FiberSpec& fb, const HyperfineTransition& t, double r,
                                const RadiationOptions& opt) {
    using Key = std::tuple<double, double, double, double, double, int, int, double, double, double,
                           double, int, double, int, int, int, double>;
    static std::mutex mu;
    static std::map<Key, RadiationRates> cache;
    const Key key{fb.radius, fb.n1, fb.n2, t.omega0, t.reduced_dipole_J, t.F, t.F_prime, t.J,
                  t.J_prime, t.I, r, opt.m_max, opt.m_truncation_tol, opt.gl_order,
                  opt.initial_panels, opt.max_panels, opt.rel_change};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    RadiationRates value = gamma_rad(fb, t, r, 0.0, opt);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, std::move(value)).first->second;
}

double free_space_rate(const HyperfineTransition& t) {
    const double D = reduced_dipole_F(t);
    return std::pow(t.omega0, 3) * D * D /
           (3 * phys::pi * phys::eps0 * phys::hbar * std::pow(phys::c, 3) * t.excited_count());
}

}  // namespace nfa
