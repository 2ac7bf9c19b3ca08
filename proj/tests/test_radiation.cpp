#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "fixtures.hpp"
#include "nfarray/constants.hpp"

using namespace nfa;
using nfa::test::cesium;
using nfa::test::default_fiber;

namespace {

// Weisskopf-Wigner rate of the J -> J' line: omega^3 |<J||d||J'>|^2 / (3 pi eps0 hbar c^3 (2J'+1)).
double free_space_oracle(const HyperfineTransition& t) {
    const double w = t.omega0, d = t.reduced_dipole_J;
    return w * w * w * d * d /
           (3 * phys::pi * phys::eps0 * phys::hbar * std::pow(phys::c, 3) * (2 * t.J_prime + 1));
}

}  // namespace

TEST_CASE("free-space oracle frozen value") {
    CHECK(free_space_oracle(cesium()) / (2 * phys::pi) == doctest::Approx(5.2487e6).epsilon(1e-4));
    CHECK(free_space_rate(cesium()) == doctest::Approx(free_space_oracle(cesium())).epsilon(1e-12));
}

TEST_CASE("radiation modes of opposite polarization are orthogonal") {
    const FiberSpec f = default_fiber();
    const double omega = cesium().omega0, k = omega / phys::c;
    for (double frac : {-0.8, -0.2, 0.0, 0.35, 0.9})
        for (int m : {-3, 0, 1, 4, 12}) {
            const RadiationMode p = make_radiation_mode(f, omega, frac * k, m, 1);
            const RadiationMode n = make_radiation_mode(f, omega, frac * k, m, -1);
            const double diag = std::abs(radiation_overlap(f, p, p));
            CHECK(diag == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(radiation_overlap(f, n, n)) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(radiation_overlap(f, p, n)) < 1e-6 * diag);
        }
}

TEST_CASE("radiation mode e_z is continuous at the surface") {
    const FiberSpec f = default_fiber();
    const double omega = cesium().omega0, k = omega / phys::c;
    for (int m : {0, 1, -2, 7})
        for (int l : {1, -1}) {
            const RadiationMode md = make_radiation_mode(f, omega, 0.4 * k, m, l);
            const cplx zin = radiation_profile(md, f, f.radius * (1 - 1e-13)).z;
            const cplx zout = radiation_profile(md, f, f.radius).z;
            CHECK(std::abs(zin - zout) < 1e-8 * std::max(std::abs(zout), 1e-300));
        }
}

TEST_CASE("J/Y exterior form agrees with the literal Hankel form") {
    const FiberSpec f = default_fiber();
    const double omega = cesium().omega0, k = omega / phys::c;
    for (int m : {0, 1, -1, 3})
        for (int l : {1, -1}) {
            const RadiationMode md = make_radiation_mode(f, omega, -0.3 * k, m, l);
            for (double x : {1.0, 1.8, 4.0}) {
                const CylVec a = radiation_profile(md, f, x * f.radius);
                const CylVec b = radiation_profile_hankel(md, f, x * f.radius);
                const double scale = std::sqrt(a.norm2());
                CHECK(std::abs(a.r - b.r) < 1e-9 * scale);
                CHECK(std::abs(a.phi - b.phi) < 1e-9 * scale);
                CHECK(std::abs(a.z - b.z) < 1e-9 * scale);
            }
            const auto lit = hankel_coefficients_literal(f, omega, -0.3 * k, m, md.A, md.B);
            const cplx stored[4] = {md.C1, md.C2, md.D1, md.D2};
            for (int j = 0; j < 4; ++j)
                CHECK(std::abs(lit[j] - stored[j]) < 1e-9 * (std::abs(stored[j]) + std::abs(stored[(j + 2) % 4])));
        }
}

TEST_CASE("radiation mode constructor rejects guided and invalid arguments") {
    const FiberSpec f = default_fiber();
    const double omega = cesium().omega0, k = omega / phys::c;
    CHECK_THROWS_AS(make_radiation_mode(f, omega, 1.01 * k, 0, 1), std::domain_error);
    CHECK_THROWS_AS(make_radiation_mode(f, omega, 0.1 * k, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(radiation_tensor(f, omega, f.radius), std::domain_error);
    CHECK_THROWS_AS(radiation_tensor(f, omega, 0.5 * f.radius), std::domain_error);
    CHECK_THROWS_AS(gamma_rad(f, cesium(), 2 * f.radius, 0.3), std::invalid_argument);
}

TEST_CASE("far from the fiber the radiative rate approaches free space") {
    const FiberSpec f = default_fiber();
    const double g0 = free_space_oracle(cesium());
    const RadiationRates far = gamma_rad(f, cesium(), 10 * f.radius);
    CHECK(far.averaged / g0 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("radiative rate matrix is Hermitian, positive and real on the diagonal") {
    const FiberSpec f = default_fiber();
    const RadiationRates rr = gamma_rad(f, cesium(), test::default_r());
    const Eigen::MatrixXcd& G = rr.per_pair;
    const double tr = G.trace().real();
    CHECK((G - G.adjoint()).norm() < 1e-10 * G.norm());
    for (int e = 0; e < G.rows(); ++e) {
        CHECK(G(e, e).real() > 0);
        CHECK(std::abs(G(e, e).imag()) < 1e-12 * G(e, e).real());
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (G + G.adjoint()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * tr);
    const Eigen::Matrix3cd& T = rr.tensor.gamma;
    CHECK((T - T.adjoint()).norm() < 1e-10 * T.norm());
}

TEST_CASE("radiative rate settles onto its asymptote between 3a and 10a") {
    const FiberSpec f = default_fiber();
    const double g0 = free_space_oracle(cesium());
    double near = 0, far = 0;
    for (double x = 3; x <= 10; x += 0.5) {
        const double dev = std::abs(gamma_rad(f, cesium(), x * f.radius).averaged / g0 - 1);
        CHECK(dev < 0.05);
        (x < 6 ? near : far) = std::max(x < 6 ? near : far, dev);
    }
    CHECK(far <= near);
}

TEST_CASE("a vanishing fiber leaves the free-space rate") {
    FiberSpec thin = default_fiber();
    thin.radius = 1e-9;
    const double g0 = free_space_oracle(cesium());
    const double r = 450e-9;
    const double dev_thin = std::abs(gamma_rad(thin, cesium(), r).averaged / g0 - 1);
    const double dev_thick = std::abs(gamma_rad(default_fiber(), cesium(), r).averaged / g0 - 1);
    CHECK(dev_thin < dev_thick);
    CHECK(dev_thin < 1e-2);
}

TEST_CASE("memoized rates equal a fresh evaluation") {
    const FiberSpec f = default_fiber();
    const RadiationRates a = gamma_rad_cached(f, cesium(), 2.2 * f.radius);
    const RadiationRates b = gamma_rad_cached(f, cesium(), 2.2 * f.radius);
    const RadiationRates c = gamma_rad(f, cesium(), 2.2 * f.radius);
    CHECK(a.averaged == b.averaged);
    CHECK(a.averaged == doctest::Approx(c.averaged).epsilon(1e-15));
}
