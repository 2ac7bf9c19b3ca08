#include "nfarray/numerics.hpp"

#include <array>
#include <map>
#include <mutex>

#include <boost/math/special_functions/bessel.hpp>

namespace nfa::num {

void ToleranceConfig::validate() const {
    if (!(root_rel_tol > 0) || !(quad_rel_tol > 0) || !(series_abs_tol > 0) ||
        !(m_truncation_tol > 0))
        throw std::invalid_argument("tolerances must be strictly positive");
    if (root_rel_tol > 1e-8) throw std::invalid_argument("root_rel_tol must be <= 1e-8");
}

namespace {

void require_finite(double x, const char* who) {
    if (!std::isfinite(x)) throw std::domain_error(std::string(who) + ": non-finite argument");
}

double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

double bessel_j(int n, double x) {
    require_finite(x, "bessel_j");
    if (n < 0) return parity(n) * bessel_j(-n, x);
    return boost::math::cyl_bessel_j(n, x);
}

double bessel_j_prime(int n, double x) {
    return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x));
}

double bessel_y(int n, double x) {
    require_finite(x, "bessel_y");
    if (x <= 0) throw std::domain_error("bessel_y: x must be positive");
    if (n < 0) return parity(n) * bessel_y(-n, x);
    return boost::math::cyl_neumann(n, x);
}

double bessel_y_prime(int n, double x) {
    return 0.5 * (bessel_y(n - 1, x) - bessel_y(n + 1, x));
}

double bessel_i(int n, double x) {
    require_finite(x, "bessel_i");
    if (n < 0) n = -n;
    return boost::math::cyl_bessel_i(n, x);
}

double bessel_i_prime(int n, double x) {
    return 0.5 * (bessel_i(n - 1, x) + bessel_i(n + 1, x));
}

double bessel_k(int n, double x) {
    require_finite(x, "bessel_k");
    if (x <= 0) throw std::domain_error("bessel_k: x must be positive");
    if (n < 0) n = -n;
    return boost::math::cyl_bessel_k(n, x);
}

double bessel_k_prime(int n, double x) {
    return -0.5 * (bessel_k(n - 1, x) + bessel_k(n + 1, x));
}

cplx hankel(int kind, int m, double x) {
    if (kind != 1 && kind != 2) throw std::invalid_argument("hankel: kind must be 1 or 2");
    if (!(x > 0)) throw std::domain_error("hankel: x must be positive");
    const double s = kind == 1 ? 1.0 : -1.0;
    return {bessel_j(m, x), s * bessel_y(m, x)};
}

cplx hankel_prime(int kind, int m, double x) {
    return 0.5 * (hankel(kind, m - 1, x) - hankel(kind, m + 1, x));
}

// ---------------------------------------------------------------------------
// Wigner symbols. Everything is carried as twice the angular momentum.

namespace {

constexpr int kMaxFactorial = 200;

const std::array<double, kMaxFactorial + 1>& log_factorials() {
    static const auto table = [] {
        std::array<double, kMaxFactorial + 1> t{};
        t[0] = 0.0;
        for (int i = 1; i <= kMaxFactorial; ++i) t[i] = t[i - 1] + std::log(double(i));
        return t;
    }();
    return table;
}

double lf(int n) {
    if (n < 0 || n > kMaxFactorial) throw std::domain_error("wigner: argument out of range");
    return log_factorials()[n];
}

int twice(double j) {
    const double t = 2.0 * j;
    const double r = std::round(t);
    if (!std::isfinite(t) || std::abs(t - r) > 1e-9)
        throw std::domain_error("wigner: spins must be integer or half-integer");
    return int(r);
}

bool triangle(int a, int b, int c) {
    return a >= 0 && b >= 0 && c >= 0 && c <= a + b && c >= std::abs(a - b) && (a + b + c) % 2 == 0;
}

// log of the triangle coefficient Delta(a b c), arguments doubled.
double log_delta(int a, int b, int c) {
    return lf((a + b - c) / 2) + lf((a - b + c) / 2) + lf((-a + b + c) / 2) - lf((a + b + c) / 2 + 1);
}

// Sum of alternating terms, accumulated from the largest magnitude down.
double ordered_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end(),
              [](double x, double y) { return std::abs(x) > std::abs(y); });
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

}  // namespace

double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3) {
    const int J1 = twice(j1), J2 = twice(j2), J3 = twice(j3);
    const int M1 = twice(m1), M2 = twice(m2), M3 = twice(m3);
    if (M1 + M2 + M3 != 0) return 0.0;
    if (!triangle(J1, J2, J3)) return 0.0;
    if (std::abs(M1) > J1 || std::abs(M2) > J2 || std::abs(M3) > J3) return 0.0;
    if ((J1 + M1) % 2 || (J2 + M2) % 2 || (J3 + M3) % 2) return 0.0;

    const double pre = 0.5 * (log_delta(J1, J2, J3) + lf((J1 + M1) / 2) + lf((J1 - M1) / 2) +
                              lf((J2 + M2) / 2) + lf((J2 - M2) / 2) + lf((J3 + M3) / 2) +
                              lf((J3 - M3) / 2));
    const int kmin = std::max({0, (J2 - J3 - M1) / 2, (J1 - J3 + M2) / 2});
    const int kmax = std::min({(J1 + J2 - J3) / 2, (J1 - M1) / 2, (J2 + M2) / 2});
    std::vector<double> terms;
    for (int k = kmin; k <= kmax; ++k) {
        const double l = lf(k) + lf((J3 - J2 + M1) / 2 + k) + lf((J3 - J1 - M2) / 2 + k) +
                         lf((J1 + J2 - J3) / 2 - k) + lf((J1 - M1) / 2 - k) + lf((J2 + M2) / 2 - k);
        terms.push_back(((k % 2) ? -1.0 : 1.0) * std::exp(pre - l));
    }
    const int phase = (J1 - J2 - M3) / 2;
    return ((phase % 2) ? -1.0 : 1.0) * ordered_sum(terms);
}

double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6) {
    const int a = twice(j1), b = twice(j2), c = twice(j3);
    const int d = twice(j4), e = twice(j5), f = twice(j6);
    if (!triangle(a, b, c) || !triangle(a, e, f) || !triangle(d, b, f) || !triangle(d, e, c))
        return 0.0;

    const double pre =
        0.5 * (log_delta(a, b, c) + log_delta(a, e, f) + log_delta(d, b, f) + log_delta(d, e, c));
    const int s1 = (a + b + c) / 2, s2 = (a + e + f) / 2, s3 = (d + b + f) / 2, s4 = (d + e + c) / 2;
    const int p1 = (a + b + d + e) / 2, p2 = (b + c + e + f) / 2, p3 = (c + a + f + d) / 2;
    const int tmin = std::max({s1, s2, s3, s4});
    const int tmax = std::min({p1, p2, p3});
    std::vector<double> terms;
    for (int t = tmin; t <= tmax; ++t) {
        const double l = lf(t + 1) - lf(t - s1) - lf(t - s2) - lf(t - s3) - lf(t - s4) -
                         lf(p1 - t) - lf(p2 - t) - lf(p3 - t);
        terms.push_back(((t % 2) ? -1.0 : 1.0) * std::exp(pre + l));
    }
    return ordered_sum(terms);
}

// ---------------------------------------------------------------------------

double find_root(const std::function<double(double)>& f, double lo, double hi, double rel_tol) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fb) || (fa > 0) == (fb > 0)) {
        if (fa == 0.0) return a;
        if (fb == 0.0) return b;
        throw RootBracketError("find_root: no sign change on [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    }
    double c = a, fc = fa, d = b - a, e = d;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < 500; ++iter) {
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * eps * std::abs(b) + 0.5 * rel_tol * std::abs(b);
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
        fb = f(b);
    }
    return b;
}

// ---------------------------------------------------------------------------

const GaussLegendreRule& gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    static std::mutex mu;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    GaussLegendreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) { p1 = x; p0 = 1.0; }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = rule.weights[order - 1 - i] = w;
    }
    if (order == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

cplx expm1(cplx z) {
    const double a = z.real(), b = z.imag();
    const double s = std::sin(0.5 * b);
    return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

}  // namespace nfa::num
