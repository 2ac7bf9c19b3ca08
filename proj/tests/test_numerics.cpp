#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nfarray/numerics.hpp"

using namespace nfa;
using namespace nfa::num;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286061;

// Ascending series, adequate for x <= 10.
double j0_series(double x) {
    double term = 1, sum = 1;
    for (int k = 1; k < 80; ++k) {
        term *= -(x * x / 4) / (double(k) * k);
        sum += term;
    }
    return sum;
}

double y0_series(double x) {
    double term = 1, harmonic = 0, sum = 0;
    for (int k = 1; k < 80; ++k) {
        term *= -(x * x / 4) / (double(k) * k);
        harmonic += 1.0 / k;
        sum -= term * harmonic;
    }
    return 2 / kPi * ((std::log(x / 2) + kEulerGamma) * j0_series(x) + sum);
}

// K_1(1) = int_0^inf exp(-cosh t) cosh t dt, trapezoid on a fine grid.
double k1_at_one_integral() {
    const double h = 1e-3;
    double sum = 0.5 * std::exp(-1.0);
    for (int i = 1; i * h < 8; ++i) {
        const double c = std::cosh(i * h);
        sum += std::exp(-c) * c;
    }
    return sum * h;
}

// x K_0(x)^2 integrated by substitution x = e^u with a trapezoid rule.
double x_k0_squared_integral() {
    const double h = 1e-3;
    double sum = 0;
    for (double u = -40; u < 4; u += h) {
        const double x = std::exp(u);
        const double k = bessel_k(0, x);
        sum += x * x * k * k;
    }
    return sum * h;
}

// Brute-force Clebsch-Gordan by the explicit Racah sum, used as a 3j oracle.
double factorial(int n) { return std::tgamma(n + 1.0); }

double cg_oracle(double j1, double m1, double j2, double m2, double J, double M) {
    if (std::abs(m1 + m2 - M) > 1e-9) return 0;
    const double pre = std::sqrt((2 * J + 1) * factorial(int(J + j1 - j2)) * factorial(int(J - j1 + j2)) *
                                 factorial(int(j1 + j2 - J)) / factorial(int(j1 + j2 + J + 1))) *
                       std::sqrt(factorial(int(J + M)) * factorial(int(J - M)) * factorial(int(j1 - m1)) *
                                 factorial(int(j1 + m1)) * factorial(int(j2 - m2)) * factorial(int(j2 + m2)));
    double sum = 0;
    for (int k = 0; k < 40; ++k) {
        const double a[] = {j1 + j2 - J - k, j1 - m1 - k, j2 + m2 - k, J - j2 + m1 + k, J - j1 - m2 + k};
        bool ok = true;
        for (double v : a) ok = ok && v > -1e-9;
        if (!ok) continue;
        double den = factorial(k);
        for (double v : a) den *= factorial(int(std::lround(v)));
        sum += (k % 2 ? -1.0 : 1.0) / den;
    }
    return pre * sum;
}

double threej_oracle(double j1, double j2, double j3, double m1, double m2, double m3) {
    const double phase = std::fmod(std::abs(j1 - j2 - m3), 2.0) < 0.5 ? 1.0 : -1.0;
    return phase / std::sqrt(2 * j3 + 1) * cg_oracle(j1, m1, j2, m2, j3, -m3);
}

}  // namespace

TEST_CASE("oracles reproduce their frozen values") {
    CHECK(j0_series(1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-14));
    CHECK(y0_series(1.0) == doctest::Approx(0.08825696421567696).epsilon(1e-13));
    CHECK(k1_at_one_integral() == doctest::Approx(0.6019072301972346).epsilon(1e-12));
    CHECK(threej_oracle(1, 1, 0, 0, 0, 0) == doctest::Approx(-1 / std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("Bessel J at the origin and at the first zero") {
    CHECK(bessel_j(0, 0) == 1.0);
    CHECK(bessel_j(1, 0) == 0.0);
    const double z = 2.404825557695773;
    CHECK(std::abs(j0_series(z)) < 1e-12);
    CHECK(std::abs(bessel_j(0, z)) < 1e-12);
    for (double x : {0.3, 1.0, 4.2, 9.5}) CHECK(bessel_j(0, x) == doctest::Approx(j0_series(x)).epsilon(1e-12));
}

TEST_CASE("Bessel derivative recurrences") {
    for (int n = 1; n <= 6; ++n)
        for (double x : {0.4, 2.0, 11.0}) {
            CHECK(bessel_j_prime(n, x) == doctest::Approx(0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))).epsilon(1e-12));
            CHECK(bessel_k_prime(n, x) ==
                  doctest::Approx(-0.5 * (bessel_k(n - 1, x) + bessel_k(n + 1, x))).epsilon(1e-12));
        }
}

TEST_CASE("Bessel K asymptotics, Wronskian and integral oracle") {
    const double x = 50;
    CHECK(bessel_k(0, x) * std::exp(x) * std::sqrt(2 * x / kPi) == doctest::Approx(1.0).epsilon(1e-2));
    const double y = 1.3;
    CHECK(bessel_i(2, y) * bessel_k_prime(2, y) - bessel_i_prime(2, y) * bessel_k(2, y) ==
          doctest::Approx(-1 / y).epsilon(1e-12));
    CHECK(bessel_k(1, 1.0) == doctest::Approx(k1_at_one_integral()).epsilon(1e-10));
    CHECK_THROWS_AS(bessel_k(0, 0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k(1, -1.0), std::domain_error);
}

TEST_CASE("non-finite arguments raise domain errors") {
    CHECK_THROWS_AS(bessel_j(0, std::nan("")), std::domain_error);
    CHECK_THROWS_AS(bessel_j(1, INFINITY), std::domain_error);
}

TEST_CASE("Hankel functions") {
    const cplx h1 = hankel(1, 2, 1.7), h2 = hankel(2, 2, 1.7);
    CHECK(std::abs(h1 - std::conj(h2)) < 1e-13);
    const double x = 2.5;
    CHECK(bessel_j(3, x) * bessel_y_prime(3, x) - bessel_j_prime(3, x) * bessel_y(3, x) ==
          doctest::Approx(2 / (kPi * x)).epsilon(1e-12));
    const cplx h = hankel(1, 0, 1.0);
    CHECK(h.real() == doctest::Approx(j0_series(1.0)).epsilon(1e-9));
    CHECK(h.imag() == doctest::Approx(y0_series(1.0)).epsilon(1e-9));
    CHECK(std::abs(h - cplx(0.7651976866, 0.0882569642)) < 1e-9);
    CHECK(std::abs(hankel(1, -3, 2.0) + hankel(1, 3, 2.0)) < 1e-13);
    CHECK(std::abs(hankel(2, -2, 2.0) - hankel(2, 2, 2.0)) < 1e-13);
    CHECK_THROWS_AS(hankel(1, 0, 0.0), std::domain_error);
}

TEST_CASE("Wronskians hold over [0.1, 50]") {
    double worst = 0;
    for (int n = 0; n <= 10; ++n)
        for (double x = 0.1; x <= 50; x *= 1.17) {
            const double wjy = bessel_j(n, x) * bessel_y_prime(n, x) - bessel_j_prime(n, x) * bessel_y(n, x);
            worst = std::max(worst, std::abs(wjy * kPi * x / 2 - 1));
            const double wik = bessel_i(n, x) * bessel_k_prime(n, x) - bessel_i_prime(n, x) * bessel_k(n, x);
            worst = std::max(worst, std::abs(-wik * x - 1));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("Wigner 3j values and selection rules") {
    CHECK(wigner_3j(1, 1, 0, 0, 0, 0) == doctest::Approx(-1 / std::sqrt(3.0)).epsilon(1e-14));
    // Stretched state: (-1)^{j1-j2+m3} / sqrt(2 j3 + 1) = 1/sqrt(11).
    CHECK(threej_oracle(4, 1, 5, 4, 1, -5) == doctest::Approx(1 / std::sqrt(11.0)).epsilon(1e-13));
    CHECK(wigner_3j(4, 1, 5, 4, 1, -5) == doctest::Approx(1 / std::sqrt(11.0)).epsilon(1e-13));
    CHECK(wigner_3j(1, 1, 1, 1, 0, 0) == 0.0);
    CHECK(wigner_3j(1, 1, 3, 0, 0, 0) == 0.0);
    CHECK(wigner_3j(1, 1, 1, 2, -2, 0) == 0.0);
    CHECK_THROWS_AS(wigner_3j(0.3, 1, 1, 0, 0, 0), std::domain_error);
}

TEST_CASE("Wigner 3j agrees with the Clebsch-Gordan oracle") {
    double worst = 0;
    for (double j1 : {0.5, 1.0, 1.5, 3.5})
        for (double j2 : {0.5, 1.0, 2.0})
            for (double j3 = std::abs(j1 - j2); j3 <= j1 + j2; j3 += 1)
                for (double m1 = -j1; m1 <= j1; m1 += 1)
                    for (double m2 = -j2; m2 <= j2; m2 += 1) {
                        const double m3 = -m1 - m2;
                        if (std::abs(m3) > j3) continue;
                        worst = std::max(worst, std::abs(wigner_3j(j1, j2, j3, m1, m2, m3) -
                                                         threej_oracle(j1, j2, j3, m1, m2, m3)));
                    }
    CHECK(worst < 1e-12);
}

TEST_CASE("Wigner 3j orthogonality and permutation symmetry") {
    double worst = 0, sym = 0;
    for (double j1 = 0; j1 <= 5; j1 += 0.5)
        for (double j2 = 0; j2 <= 5; j2 += 0.5)
            for (double j3 = std::abs(j1 - j2); j3 <= std::min(5.0, j1 + j2); j3 += 1)
                for (double m3 = -j3; m3 <= j3; m3 += 1) {
                    double sum = 0;
                    for (double m1 = -j1; m1 <= j1; m1 += 1) {
                        const double m2 = -m1 - m3;
                        if (std::abs(m2) > j2) continue;
                        const double v = wigner_3j(j1, j2, j3, m1, m2, m3);
                        sum += v * v;
                        const double odd = std::fmod(j1 + j2 + j3, 2.0) < 0.5 ? 1.0 : -1.0;
                        sym = std::max(sym, std::abs(wigner_3j(j2, j3, j1, m2, m3, m1) - v));
                        sym = std::max(sym, std::abs(wigner_3j(j2, j1, j3, m2, m1, m3) - odd * v));
                    }
                    worst = std::max(worst, std::abs((2 * j3 + 1) * sum - 1));
                }
    CHECK(worst < 1e-10);
    CHECK(sym < 1e-12);
}

TEST_CASE("Wigner 6j") {
    CHECK(wigner_6j(1, 1, 1, 1, 1, 1) == doctest::Approx(1.0 / 6).epsilon(1e-13));
    // One zero argument: (-1)^{j1+j2+j3} / sqrt((2 j2 + 1)(2 j3 + 1)).
    CHECK(wigner_6j(1, 2, 2, 0, 2, 2) == doctest::Approx(-1.0 / 5).epsilon(1e-13));
    CHECK(wigner_6j(1, 1, 3, 1, 1, 1) == 0.0);
    // Orthogonality: sum_x (2x+1)(2j+1) {a b x; c d j}{a b x; c d j'} = delta_jj'.
    const double a = 1.5, b = 2, c = 2.5, d = 1;
    for (double j = 0.5; j <= 3.5; j += 1) {
        double sum = 0;
        for (double x = 0.5; x <= 5; x += 1) sum += (2 * x + 1) * (2 * j + 1) * std::pow(wigner_6j(a, b, x, c, d, j), 2);
        const bool allowed = j >= std::abs(a - d) && j <= a + d && j >= std::abs(c - b) && j <= c + b;
        CHECK(sum == doctest::Approx(allowed ? 1.0 : 0.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(wigner_6j(0.2, 1, 1, 1, 1, 1), std::domain_error);
}

TEST_CASE("find_root") {
    CHECK(find_root([](double x) { return x * x - 2; }, 1, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(find_root([](double x) { return std::cos(x); }, 1, 2) == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK_THROWS_AS(find_root([](double x) { return x - 5; }, 0, 1), RootBracketError);
    auto f = [](double x) { return std::exp(x) - 3; };
    CHECK(find_root(f, 0, 2) == find_root(f, 0, 2));
}

TEST_CASE("quadrature") {
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, kPi) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate_gauss_legendre([](double x) { return x * x * x; }, 0.0, 1.0, 2) ==
          doctest::Approx(0.25).epsilon(1e-15));
    const cplx z = integrate([](double x) { return std::exp(cplx(0, x)); }, 0.0, kPi / 2);
    CHECK(std::abs(z - cplx(1, 1)) < 1e-12);
    // x K_0(x)^2 over (0, inf) equals 1/2; tail beyond x = 40 is below 1e-30.
    CHECK(x_k0_squared_integral() == doctest::Approx(0.5).epsilon(1e-8));
    const double v = integrate([](double x) { const double k = bessel_k(0, x); return x * k * k; }, 0.0, 40.0, 1e-10);
    CHECK(v == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_THROWS_AS(integrate([](double x) { return 1 / x; }, 0.0, 1.0, 1e-12, 0.0, 50), QuadratureError<double>);
}

TEST_CASE("tolerance config validation") {
    ToleranceConfig t;
    CHECK_NOTHROW(t.validate());
    t.root_rel_tol = 1e-6;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    t.root_rel_tol = 1e-12;
    t.quad_rel_tol = 0;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("complex expm1 keeps precision near zero") {
    const cplx z(1e-12, -3e-13);
    const cplx v = expm1(z);
    CHECK(std::abs(v - (z + z * z / 2.0)) / std::abs(z) < 1e-15);
    CHECK(std::abs(expm1(cplx(2, 1)) - (std::exp(cplx(2, 1)) - 1.0)) < 1e-13);
}
