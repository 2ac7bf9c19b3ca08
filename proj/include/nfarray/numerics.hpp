#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace nfa {

using cplx = std::complex<double>;

namespace num {

struct ToleranceConfig {
    double root_rel_tol = 1e-12;
    double quad_rel_tol = 1e-10;
    double series_abs_tol = 1e-14;
    double m_truncation_tol = 1e-6;

    // Throws std::invalid_argument on a non-positive or too-loose tolerance.
    void validate() const;
};

// Bessel family, integer order, real argument. Negative orders follow the
// reflection formulas. Non-finite arguments raise std::domain_error.
double bessel_j(int n, double x);
double bessel_j_prime(int n, double x);
double bessel_y(int n, double x);
double bessel_y_prime(int n, double x);
double bessel_i(int n, double x);
double bessel_i_prime(int n, double x);
double bessel_k(int n, double x);
double bessel_k_prime(int n, double x);

// H_m^(1) = J + iY, H_m^(2) = J - iY; x > 0.
cplx hankel(int kind, int m, double x);
cplx hankel_prime(int kind, int m, double x);

// Wigner symbols for integer or half-integer arguments. Selection-rule
// violations return 0; non-half-integer input raises std::domain_error.
double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3);
double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6);

struct RootBracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Brent's method. Requires a sign change on [lo, hi].
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = 1e-12);

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Nodes from Newton iteration on the Legendre recurrence; cached per order.
const GaussLegendreRule& gauss_legendre(int order);

template <class F>
auto integrate_gauss_legendre(F&& f, double a, double b, int order, int panels = 1)
    -> std::decay_t<decltype(f(a))> {
    using R = std::decay_t<decltype(f(a))>;
    const auto& rule = gauss_legendre(order);
    const double width = (b - a) / panels;
    R total{};
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double half = 0.5 * width, mid = lo + half;
        R part{};
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            part += rule.weights[i] * f(mid + half * rule.nodes[i]);
        total += half * part;
    }
    return total;
}

template <class R>
struct QuadratureError : std::runtime_error {
    R best_estimate;
    double error_estimate;
    QuadratureError(const std::string& what, R best, double err)
        : std::runtime_error(what), best_estimate(best), error_estimate(err) {}
};

namespace detail {
// 7-point Gauss / 15-point Kronrod pair.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F, class R>
void gk15(F& f, double a, double b, R& value, double& err) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    const R fc = f(mid);
    R kron = fc * kWgk[7];
    R gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const R f1 = f(mid - dx), f2 = f(mid + dx);
        kron += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    value = kron * half;
    err = std::abs((kron - gauss) * half);
}
}  // namespace detail

// Globally adaptive Gauss-Kronrod (7,15). Converges when the summed error
// estimate drops below rel_tol * |result| (or abs_tol). Throws QuadratureError
// carrying the best estimate after max_intervals subdivisions.
template <class F>
auto integrate(F&& f, double a, double b, double rel_tol = 1e-10, double abs_tol = 0.0,
               int max_intervals = 4000) -> std::decay_t<decltype(f(a))> {
    using R = std::decay_t<decltype(f(a))>;
    struct Piece {
        double a, b;
        R value;
        double err;
        bool operator<(const Piece& o) const { return err < o.err; }
    };
    std::priority_queue<Piece> heap;
    R total{};
    double total_err = 0.0;
    {
        Piece p{a, b, R{}, 0.0};
        detail::gk15(f, a, b, p.value, p.err);
        total = p.value;
        total_err = p.err;
        heap.push(p);
    }
    int count = 1;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (count >= max_intervals)
            throw QuadratureError<R>("integrate: subdivision limit reached", total, total_err);
        Piece worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        Piece left{worst.a, m, R{}, 0.0}, right{m, worst.b, R{}, 0.0};
        detail::gk15(f, left.a, left.b, left.value, left.err);
        detail::gk15(f, right.a, right.b, right.value, right.err);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        ++count;
        if (count % 64 == 0) {  // refresh sums to shed accumulated rounding
            std::priority_queue<Piece> copy = heap;
            total = R{};
            total_err = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                total_err += copy.top().err;
                copy.pop();
            }
        }
    }
    return total;
}

// exp(z) - 1 without cancellation for small |z|.
cplx expm1(cplx z);

}  // namespace num
}  // namespace nfa
