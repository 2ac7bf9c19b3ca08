#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "nfarray/constants.hpp"

using namespace nfa;
using nfa::test::default_model;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Index into a circular coupling set for direction f and helicity l.
int circ_index(int f, int l) { return (f == 1 ? 0 : 2) + (l == 1 ? 0 : 1); }

}  // namespace

TEST_CASE("pi transitions do not couple to y-polarized modes at phi = 0") {
    const AtomModel& m = default_model();
    const DipoleTable d(m.site.transition);
    for (int k : {1, 3})
        for (int ie = 0; ie < d.n_e(); ++ie)
            for (int ig = 0; ig < d.n_g(); ++ig)
                if (d.q(ie, ig) == 0) CHECK(std::abs(m.linear[k].values(ie, ig)) == 0.0);
}

TEST_CASE("coupling magnitudes do not depend on propagation direction") {
    const AtomModel& m = default_model();
    for (int k : {0, 1}) {
        const Eigen::MatrixXd fwd = m.circular[k].values.cwiseAbs();
        const Eigen::MatrixXd bwd = m.circular[k + 2].values.cwiseAbs();
        CHECK((fwd - bwd).cwiseAbs().maxCoeff() < 1e-14 * fwd.maxCoeff());
    }
}

TEST_CASE("closed-form couplings agree with the projected mode vectors") {
    const AtomModel& m = default_model();
    for (int f : {1, -1})
        for (Pol l : {Pol::CircPlus, Pol::CircMinus}) {
            const CouplingTable direct = coupling(m.site, f, l);
            const CouplingTable closed = coupling_closed_form(m.site, f, l);
            CHECK(max_abs(direct.values - closed.values) < 1e-12 * max_abs(direct.values));
        }
    CHECK_THROWS_AS(coupling_closed_form(m.site, 1, Pol::X), std::invalid_argument);
}

TEST_CASE("quasilinear couplings from the quasicircular pair") {
    const AtomModel& m = default_model();
    for (int f : {1, -1})
        for (Pol xi : {Pol::X, Pol::Y}) {
            const CouplingTable built =
                coupling_linear(coupling(m.site, f, Pol::CircPlus), coupling(m.site, f, Pol::CircMinus), xi);
            const CouplingTable direct = coupling(m.site, f, xi);
            CHECK(max_abs(built.values - direct.values) < 1e-12 * max_abs(direct.values));
        }
    CHECK_THROWS_AS(coupling_linear(m.circular[0], m.circular[3], Pol::X), std::invalid_argument);
}

TEST_CASE("mirror sum rule for coupling products") {
    const AtomModel& m = default_model();
    double worst = 0, scale = 0;
    for (int f : {1, -1})
        for (int fp : {1, -1})
            for (int l : {1, -1})
                for (int lp : {1, -1}) {
                    const auto& a = m.circular[circ_index(f, l)].values;
                    const auto& b = m.circular[circ_index(fp, lp)].values;
                    const auto& am = m.circular[circ_index(f, -l)].values;
                    const auto& bm = m.circular[circ_index(fp, -lp)].values;
                    const cplx lhs = (a.conjugate().cwiseProduct(b)).sum();
                    const cplx rhs = (am.conjugate().cwiseProduct(bm)).sum();
                    worst = std::max(worst, std::abs(lhs - rhs));
                    scale = std::max(scale, std::abs(lhs));
                }
    CHECK(worst < 1e-12 * scale);
}

TEST_CASE("guided rate matrix is basis independent per direction") {
    const AtomModel& m = default_model();
    for (int k : {0, 2}) {
        const Eigen::MatrixXcd circ = m.circular[k].values * m.circular[k].values.adjoint() +
                                      m.circular[k + 1].values * m.circular[k + 1].values.adjoint();
        const Eigen::MatrixXcd lin = m.linear[k].values * m.linear[k].values.adjoint() +
                                     m.linear[k + 1].values * m.linear[k + 1].values.adjoint();
        CHECK(max_abs(circ - lin) < 1e-12 * max_abs(lin));
    }
    const GuidedRates gc = guided_rates(m.circular), gl = guided_rates(m.linear);
    CHECK(gc.averaged == doctest::Approx(gl.averaged).epsilon(1e-12));
    for (int e = 0; e < gl.per_pair.rows(); ++e) CHECK(gl.per_pair(e, e).real() > 0);
}

TEST_CASE("y-channel one-dimensional rate and the directional constant") {
    const AtomModel& m = default_model();
    const DecayRates& r = m.rates;
    CHECK(r.gamma_1d_y == doctest::Approx(r.u0 * m.site.ephi * m.site.ephi).epsilon(1e-12));
    CHECK(r.gamma_s == doctest::Approx(r.u0 * m.site.er * m.site.ez).epsilon(1e-14));
    CHECK(r.gamma_s / r.gamma_total < 0.2);
    CHECK(r.gamma_total == r.gamma_gyd + r.gamma_rad);
    CHECK(r.gamma_gyd < r.gamma_total);
    CHECK(r.gamma_gyd / r.gamma_total > 0.005);
    CHECK(r.gamma_gyd / r.gamma_total < 0.2);
}

TEST_CASE("sublevel sum of guided rates equals u0 times the mode intensity") {
    const AtomModel& m = default_model();
    const HyperfineTransition& t = m.site.transition;
    double brute = 0;
    for (const CouplingTable& c : m.linear) brute += c.values.cwiseAbs2().sum();
    brute /= t.ground_count();
    CHECK(brute == doctest::Approx(m.rates.u0 * m.site.profile.norm2()).epsilon(1e-10));
    CHECK(m.rates.gamma_gyd * t.excited_count() / t.ground_count() ==
          doctest::Approx(m.rates.u0 * m.site.profile.norm2()).epsilon(1e-10));
}

TEST_CASE("flat-average emission is the same forward and backward") {
    const GuidedRates g = guided_rates(default_model().linear);
    CHECK(g.forward == doctest::Approx(g.backward).epsilon(1e-12));
    CHECK(g.forward + g.backward == doctest::Approx(g.averaged).epsilon(1e-12));
}

TEST_CASE("coupling magnitudes decay away from the fiber") {
    const FiberSpec f = test::default_fiber();
    const HyperfineTransition t = test::cesium();
    Eigen::MatrixXd prev;
    for (double x = 1.05; x <= 4; x += 0.25) {
        const AtomSite s = make_site(f, t, x * f.radius);
        Eigen::MatrixXd cur(t.excited_count(), 4 * t.ground_count());
        for (int k = 0; k < 4; ++k) {
            const CouplingTable c = coupling(s, k < 2 ? 1 : -1, k % 2 ? Pol::CircMinus : Pol::CircPlus);
            cur.middleCols(k * t.ground_count(), t.ground_count()) = c.values.cwiseAbs();
        }
        if (prev.size() > 0)
            for (Eigen::Index i = 0; i < cur.size(); ++i)
                if (prev.data()[i] > 0) CHECK(cur.data()[i] < prev.data()[i]);
        prev = cur;
    }
}

TEST_CASE("total rate approaches the free-space value far from the fiber") {
    const AtomModel& far = test::model_at(10 * test::default_fiber().radius);
    const double g0 = free_space_rate(test::cesium());
    CHECK(far.rates.gamma_total / g0 == doctest::Approx(1.0).epsilon(0.02));
    CHECK(far.rates.gamma_gyd < 1e-3 * g0);
}
