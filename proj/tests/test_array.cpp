#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "nfarray/array.hpp"
#include "nfarray/constants.hpp"

using namespace nfa;
using nfa::test::default_model;

namespace {

constexpr double kMHz = 2 * phys::pi * 1e6;
constexpr cplx I(0, 1);

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

PolarizationChannel channel(Channel xi, double delta = 0.0) {
    return single_atom_transfer(xi, channel_scalars(default_model(), delta));
}

const ModeSolution& mode() { return default_model().site.mode; }

double bragg() { return bragg_period(mode(), 2); }

ArrayResponse product_response(const Eigen::Matrix2cd& M, double beta, double Lambda, long N) {
    return response_from_W(total_transfer_product(M, free_propagator(beta, Lambda), N));
}

}  // namespace

TEST_CASE("free propagation") {
    CHECK(max_abs(free_propagator(1.3e7, 0.0) - Eigen::Matrix2cd::Identity()) == 0.0);
    CHECK(std::abs(std::abs(free_propagator(1.3e7, 417e-9).determinant()) - 1) < 1e-15);
    const double beta = 2 * phys::pi / 500e-9;
    CHECK(max_abs(free_propagator(beta, 500e-9) - Eigen::Matrix2cd::Identity()) < 1e-12);
    CHECK(max_abs(free_propagator4(beta, 500e-9) - Eigen::Matrix4cd::Identity()) < 1e-12);
    CHECK_THROWS_AS(free_propagator(beta, -1e-9), std::invalid_argument);
}

TEST_CASE("Bragg period and scenario validation") {
    CHECK(bragg() * 1e9 == doctest::Approx(745.91).epsilon(1e-4));
    CHECK(bragg_period(mode(), 1) == doctest::Approx(bragg() / 2).epsilon(1e-15));
    CHECK_THROWS_AS(bragg_period(mode(), 0), std::invalid_argument);
    CHECK(beta_at_detuning(mode(), 0.0) == mode().beta);
    ArrayScenario sc{0, 500e-9, 1e-6, 0.0};
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc.N = 3;
    sc.Lambda = 0;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("total transfer product against the naive product") {
    const Eigen::Matrix2cd M = channel(Channel::X, 3 * kMHz).M;
    const Eigen::Matrix2cd F = free_propagator(mode().beta, 498e-9);
    CHECK(max_abs(total_transfer_product(M, F, 1).value() - M) < 1e-15);
    const Eigen::Matrix2cd naive = M * F * M * F * M;
    CHECK(max_abs(total_transfer_product(M, F, 3).value() - naive) < 1e-14);

    const Eigen::Matrix4cd M4 = general_transfer_4x4(scattering_matrix(default_model(), 3 * kMHz));
    const Eigen::Matrix4cd F4 = free_propagator4(mode().beta, 498e-9);
    std::vector<Eigen::Matrix4cd> Ms(5, M4), Fs(4, F4);
    CHECK(max_abs(total_transfer_product(M4, F4, 5).value() - inhomogeneous_product(Ms, Fs)) < 1e-13);
    CHECK_THROWS_AS(inhomogeneous_product(Ms, Ms), std::invalid_argument);
}

TEST_CASE("determinant of the total transfer matrix stays 1") {
    // 30 MHz off resonance the entries stay O(1) and the determinant is well conditioned.
    for (Channel xi : {Channel::X, Channel::Y}) {
        const Eigen::Matrix2cd M = channel(xi, 30 * kMHz).M;
        const auto W = total_transfer_product(M, free_propagator(mode().beta, 498e-9), 1000);
        const cplx det = W.matrix.determinant() * std::exp(2 * W.log_scale);
        CHECK(std::abs(det - 1.0) < 1e-10);
    }
    // On resonance |W| grows like exp(N D / 2); only the relative form is meaningful.
    const Eigen::Matrix2cd M = channel(Channel::X).M;
    const auto W = total_transfer_product(M, free_propagator(mode().beta, 498e-9), 1000);
    const double scale = std::pow(W.matrix.cwiseAbs().maxCoeff(), 2);
    CHECK(std::abs(W.matrix.determinant() - std::exp(-2 * W.log_scale)) < 1e-12 * scale);
}

TEST_CASE("Bloch parameter satisfies its defining identities") {
    for (double Lambda : {498e-9, 620e-9, bragg()})
        for (Channel xi : {Channel::X, Channel::Y}) {
            const Eigen::Matrix2cd M = channel(xi, 2 * kMHz).M;
            const cplx e = std::exp(I * mode().beta * Lambda);
            const cplx D = 0.5 * (M(0, 0) * e + M(1, 1) / e);
            const cplx theta = transfer_theta(M, mode().beta, Lambda);
            CHECK(std::abs(std::cosh(theta) - D) < 1e-12);
            CHECK(std::abs(std::pow(std::sinh(theta), 2) - (D * D - 1.0)) < 1e-12);
            const SinhRatios s = sinh_ratios(theta, 10);
            CHECK(s.vartheta.real() >= 0);
        }
}

TEST_CASE("closed-form transfer matches the product over random draws") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> lam(300e-9, 1200e-9), det(-40, 40);
    std::uniform_int_distribution<long> count(1, 2000);
    double worst = 0;
    for (int i = 0; i < 40; ++i) {
        const double delta = det(rng) * kMHz, Lambda = lam(rng);
        const long N = count(rng);
        const Eigen::Matrix2cd M = channel(i % 2 ? Channel::Y : Channel::X, delta).M;
        const double beta = beta_at_detuning(mode(), delta);
        const ClosedTransfer c = total_transfer_closed(M, beta, Lambda, N);
        const auto p = total_transfer_product(M, free_propagator(beta, Lambda), N);
        const Eigen::Matrix2cd a = c.W.matrix * std::exp(c.W.log_scale - p.log_scale);
        worst = std::max(worst, max_abs(a - p.matrix) / max_abs(p.matrix));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("ray-optics recurrence reproduces direct evaluation") {
    for (Channel xi : {Channel::X, Channel::Y}) {
        const PolarizationChannel c = channel(xi, 1.5 * kMHz);
        const double beta = beta_at_detuning(mode(), 1.5 * kMHz), Lambda = 510e-9;
        cplx RN = c.R, TN = c.T;
        double worst = 0;
        for (long N = 1; N <= 200; ++N) {
            const ArrayResponse direct = array_response(c.M, beta, Lambda, N);
            worst = std::max(worst, std::abs(direct.R_N - RN) + std::abs(direct.T_N - TN));
            std::tie(RN, TN) = recurrence_step(RN, TN, c.R, c.T, beta, Lambda);
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("y channel at Bragg follows the rational closed form") {
    const AtomModel& m = default_model();
    const PolarizationChannel y = channel(Channel::Y);
    for (long N : {1L, 2L, 17L, 800L, 5000L}) {
        const BraggResult b = bragg_response(y, N, 2);
        const ArrayResponse mat = product_response(y.M, mode().beta, bragg(), N);
        const BraggResult rates = bragg_y_rates(m.rates.gamma_1d_y, m.rates.gamma_total, 0.0, N, 2);
        const double g1 = m.rates.gamma_1d_y, g = m.rates.gamma_total;
        const cplx formula = -double(N) * g1 / (g + double(N - 1) * g1);
        CHECK(std::abs(b.R_N - mat.R_N) < 1e-10);
        CHECK(std::abs(b.T_N - mat.T_N) < 1e-10);
        CHECK(std::abs(rates.R_N - formula) < 1e-12);
        CHECK(std::abs(b.R_N - formula) < 1e-10);
        CHECK(b.vartheta == cplx(0.0));
    }
    CHECK(std::norm(bragg_response(y, 800, 2).R_N) > 0.78);
    CHECK(std::abs(bragg_response(y, 10000000, 2).R_N + 1.0) < 1e-4);
}

TEST_CASE("y reflectivity at Bragg is Lorentzian in detuning") {
    const AtomModel& m = default_model();
    const long N = 300;
    for (double d : {-30.0, -4.0, 0.0, 2.5, 12.0}) {
        const double delta = d * kMHz;
        const PolarizationChannel y = channel(Channel::Y, delta);
        // The detuning shift of beta is kept out so only the atomic response varies.
        const ArrayResponse mat = product_response(y.M, mode().beta, bragg(), N);
        const double g1 = m.rates.gamma_1d_y, g = m.rates.gamma_total;
        const double A = g + (N - 1) * g1;
        const double lorentz = double(N) * N * g1 * g1 / (A * A + 4 * delta * delta);
        CHECK(mat.reflectivity == doctest::Approx(lorentz).epsilon(1e-10));
    }
}

TEST_CASE("x channel infinite-array reflectivity at Bragg") {
    const PolarizationChannel x = channel(Channel::X);
    const cplx Rinf = bragg_r_infinity(x);
    CHECK(std::norm(Rinf) == doctest::Approx(0.087).epsilon(0.1));
    const BraggResult big = bragg_response(x, 150000, 2);
    CHECK(std::abs(big.R_N - Rinf) < 1e-6);
    const BraggResult mid = bragg_response(x, 800, 2);
    const ArrayResponse mat = product_response(x.M, mode().beta, bragg(), 800);
    CHECK(std::abs(mid.R_N - mat.R_N) < 1e-10);
    CHECK(std::abs(mid.T_N - mat.T_N) < 1e-10);
}

TEST_CASE("four-mode input-output solve") {
    const std::array<cplx, 4> in{cplx(0.3, 0.1), cplx(-0.2, 0.7), cplx(0.5, 0), cplx(0, -0.4)};
    const auto out = input_output_4mode(Eigen::Matrix4cd::Identity(), in);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(out[k] - in[k]) < 1e-15);

    const double beta = mode().beta, Lambda = 560e-9;
    const long N = 60;
    const Eigen::Matrix4cd M4 = general_transfer_4x4(scattering_matrix(default_model(), 2 * kMHz));
    const Eigen::Matrix4cd W = total_transfer_product(M4, free_propagator4(beta, Lambda), N).value();
    const ArrayResponse x = array_response(channel(Channel::X, 2 * kMHz).M, beta, Lambda, N);
    const ArrayResponse y = array_response(channel(Channel::Y, 2 * kMHz).M, beta, Lambda, N);

    const auto ux = input_output_4mode(W, {1.0, 0.0, 0.0, 0.0});
    CHECK(std::abs(ux[0] - x.T_N) < 1e-12);
    CHECK(std::abs(ux[2] - x.R_N) < 1e-12);
    CHECK(std::abs(ux[1]) < 1e-12);
    CHECK(std::abs(ux[3]) < 1e-12);
    const auto uy = input_output_4mode(W, {0.0, 1.0, 0.0, 0.0});
    CHECK(std::abs(uy[1] - y.T_N) < 1e-12);
    CHECK(std::abs(uy[3] - y.R_N) < 1e-12);

    // Light entering from the right sees the mirror-image array.
    const auto rx = input_output_4mode(W, {0.0, 0.0, 1.0, 0.0});
    CHECK(std::abs(rx[2] - x.T_N) < 1e-12);
    CHECK(std::abs(rx[0] - x.R_N) < 1e-12);
}

TEST_CASE("homogenized propagation") {
    const double beta = mode().beta, L = 3.7e-6;
    const Eigen::Matrix2cd H = homogenized_transfer(Eigen::Matrix2cd(Eigen::Matrix2cd::Zero()), beta, 500e-9, L);
    CHECK(std::abs(H(0, 0) - std::exp(I * beta * L)) < 1e-12);
    CHECK(std::abs(H(1, 1) - std::exp(-I * beta * L)) < 1e-12);
    CHECK(std::abs(H(0, 1)) < 1e-14);

    const ScatteringMatrix s = scattering_matrix(default_model(), 0.0);
    const double Lambda = 498e-9;
    const long N = 100;
    for (Channel xi : {Channel::X, Channel::Y}) {
        const int p = xi == Channel::X ? 0 : 1;
        Eigen::Matrix2cd S2;
        S2 << s.S(p, p), s.S(p, p + 2), s.S(p + 2, p), s.S(p + 2, p + 2);
        const Eigen::Matrix2cd Wh = homogenized_transfer(S2, beta, Lambda, N * Lambda);
        const double Th = std::norm(1.0 / Wh(1, 1));
        const ArrayResponse d = product_response(channel(xi).M, beta, Lambda, N);
        CHECK(Th == doctest::Approx(d.transmittivity).epsilon(0.02));
    }
    const Eigen::Matrix4cd W4 = homogenized_transfer(s.S, beta, Lambda, N * Lambda);
    CHECK(std::abs(W4(0, 1)) < 1e-12);
}

TEST_CASE("off-Bragg optical depth adds up atom by atom") {
    const ScatteringMatrix s = scattering_matrix(default_model(), 0.0);
    const double D = optical_depth(s, 1);
    const ArrayResponse r = product_response(channel(Channel::Y).M, mode().beta, 498e-9, 50);
    CHECK(-std::log(r.transmittivity) == doctest::Approx(50 * D).epsilon(0.05));
}

TEST_CASE("power bookkeeping") {
    for (double Lambda : {498e-9, bragg()})
        for (double d : {-10.0, 0.0, 6.0})
            for (long N : {1L, 40L, 400L}) {
                const double beta = beta_at_detuning(mode(), d * kMHz);
                const ArrayResponse x = array_response(channel(Channel::X, d * kMHz).M, beta, Lambda, N);
                const ArrayResponse y = array_response(channel(Channel::Y, d * kMHz).M, beta, Lambda, N);
                CHECK(x.P_tot < 1.0);
                CHECK(y.P_tot < 1.0);
                const CircularResponse c = circular_response(x, y);
                CHECK(c.P_tot == doctest::Approx((x.P_tot + y.P_tot) / 2).epsilon(1e-12));
            }
    const double beta = mode().beta;
    const ArrayResponse x = array_response(channel(Channel::X).M, beta, 498e-9, 400);
    const ArrayResponse y = array_response(channel(Channel::Y).M, beta, 498e-9, 400);
    CHECK(circular_response(x, y).P_tot < 1e-2);
}

TEST_CASE("off-Bragg backward power oscillates at twice the mismatch phase") {
    const double beta = mode().beta, Lambda = 498e-9;
    const PolarizationChannel x = channel(Channel::X);
    const int count = 400;
    std::vector<double> series(count);
    double mean = 0;
    for (int n = 0; n < count; ++n) {
        series[n] = array_response(x.M, beta, Lambda, n + 1).reflectivity;
        mean += series[n] / count;
    }
    double best_w = 0, best_p = -1;
    for (int k = 1; k < count / 2; ++k) {
        const double w = 2 * phys::pi * k / count;
        cplx acc = 0;
        for (int n = 0; n < count; ++n) acc += (series[n] - mean) * std::exp(-I * (w * n));
        if (std::norm(acc) > best_p) best_p = std::norm(acc), best_w = w;
    }
    double expect = 2 * std::fmod(beta * Lambda, phys::pi);
    if (expect > phys::pi) expect = 2 * phys::pi - expect;
    CHECK(best_w == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("a million atoms stay finite") {
    for (Channel xi : {Channel::X, Channel::Y})
        for (double Lambda : {498e-9, bragg()}) {
            const ArrayResponse r = array_response(channel(xi).M, mode().beta, Lambda, 1000000);
            CHECK(std::isfinite(r.R_N.real()));
            CHECK(std::isfinite(r.R_N.imag()));
            CHECK(std::isfinite(r.T_N.real()));
            CHECK(r.P_tot <= 1.0);
        }
}
