#include "nfarray/acceptance.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <random>

#include "nfarray/bandgap.hpp"
#include "nfarray/constants.hpp"

namespace nfa {

namespace {

constexpr double kTwoPiMHz = 2 * phys::pi * 1e6;
constexpr double kTwoPiGHz = 2 * phys::pi * 1e9;

// Collects sub-checks of one criterion.
struct Checker {
    std::vector<std::string> lines;
    bool ok = true;

    template <class... Args>
    void check(bool pass, const char* fmt, Args... args) {
        char buf[256];
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wformat-security"
        std::snprintf(buf, sizeof buf, fmt, args...);
#pragma GCC diagnostic pop
        lines.push_back(std::string(pass ? "ok    " : "FAIL  ") + buf);
        ok = ok && pass;
    }
    void within_rel(const char* what, double value, double target, double rel) {
        const double dev = std::abs(value - target) / std::abs(target);
        check(dev <= rel, "%s = %.6g, target %.6g +/- %.0f%% (deviation %.2f%%)", what, value, target,
              100 * rel, 100 * dev);
    }
};

const FiberSpec& fiber() {
    static const FiberSpec f{};
    return f;
}

// Cached atom models; the radiation integral dominates construction.
const AtomModel& atom_at(double r) {
    static std::map<double, AtomModel> cache;
    auto it = cache.find(r);
    if (it == cache.end()) it = cache.emplace(r, build_atom_model(fiber(), cesium_d2_default(), r)).first;
    return it->second;
}

const AtomModel& atom_200nm() { return atom_at(fiber().radius + 200e-9); }

void criterion1(Checker& c) {
    const FiberSpec& f = fiber();
    const HyperfineTransition t = cesium_d2_default();
    c.check(std::abs(t.wavelength() - 852e-9) < 1e-12, "transition wavelength %.3f nm", t.wavelength() * 1e9);
    const ModeSolution m = solve_mode(f, t.omega0);
    c.check(m.residual < 1e-10, "eigenvalue residual %.3g < 1e-10", m.residual);
    double lo = 1e9, hi = 0;
    for (int i = 0; i <= 2000; ++i) {
        const double r = f.radius * (1 + 1e-9 + 9.0 * i / 2000);
        const CylVec e = profile_reference(m, f, r);
        const double ratio = std::abs(e.r) / std::abs(e.z);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    c.check(lo > 1.75 && hi < 2.1, "|e_r|/|e_z| over 1 < r/a <= 10 spans [%.4f, %.4f] inside (1.75, 2.1)", lo, hi);
}

void criterion2(Checker& c) {
    const AtomModel& a = atom_at(1.8 * fiber().radius);
    const ScatteringMatrix lin = scattering_matrix(a, 0.0, Basis::Linear);
    const ScatteringMatrix circ = scattering_matrix(a, 0.0, Basis::Circular);
    c.within_rel("D quasicircular", optical_depth(circ, 0), 0.036, 0.15);
    c.within_rel("D x", optical_depth(lin, 0), 0.053, 0.15);
    c.within_rel("D y", optical_depth(lin, 1), 0.019, 0.15);
}

void criterion3(Checker& c) {
    // Exterior side of the surface.
    const AtomModel& a = atom_at(fiber().radius * (1 + 1e-12));
    const PolarizationChannel ch = single_atom_transfer(Channel::X, channel_scalars(a, 0.0));
    c.within_rel("single-atom |R|^2 (x, r = a)", std::norm(ch.R), 0.009, 0.20);
}

void criterion4(Checker& c) {
    const AtomModel& a = atom_200nm();
    const double Lambda = bragg_period(a.site.mode, 2);
    c.check(std::abs(Lambda - 745e-9) < 2e-9, "Bragg period (order 2) %.2f nm", Lambda * 1e9);
    const PolarizationChannel ch = single_atom_transfer(Channel::X, channel_scalars(a, 0.0));
    const double r_inf = std::norm(bragg_r_infinity(ch));
    c.within_rel("|R_inf|^2 (x, Bragg)", r_inf, 0.087, 0.10);
    const double profile = std::pow(bragg_r_infinity_profile(a.site.er, a.site.ez), 2);
    const ArrayResponse big = array_response(ch.M, a.site.mode.beta, Lambda, 150000);
    const double diff = std::abs(profile - big.reflectivity);
    c.check(diff <= 1e-3, "profile-only |R_inf|^2 %.6f vs N = 150000 numeric %.6f: |diff| %.2e <= 1e-3", profile,
            big.reflectivity, diff);
}

void criterion5(Checker& c) {
    const AtomModel& a = atom_200nm();
    const ModeSolution& m = a.site.mode;
    const double Lambda = bragg_period(m, 2);
    const PolarizationChannel ch = single_atom_transfer(Channel::Y, channel_scalars(a, 0.0));
    const Eigen::Matrix2cd F = free_propagator(m.beta, Lambda);
    const ArrayResponse far = response_from_W(total_transfer_product(ch.M, F, 1000000));
    c.check(std::abs(far.R_N + 1.0) < 1e-3, "R_N at N = 1e6 is %.6f%+.6fi, |R_N + 1| < 1e-3", far.R_N.real(),
            far.R_N.imag());
    const ArrayResponse n800 = response_from_W(total_transfer_product(ch.M, F, 800));
    c.check(n800.reflectivity > 0.78, "|R_N|^2 at N = 800 is %.5f > 0.78", n800.reflectivity);
    for (long N : {1L, 10L, 100L, 1600L}) {
        const BraggResult rates = bragg_y_rates(a.rates.gamma_1d_y, a.rates.gamma_total, 0.0, N, 2);
        const ArrayResponse mat = response_from_W(total_transfer_product(ch.M, F, N));
        const double dr = std::abs(rates.R_N - mat.R_N), dt = std::abs(rates.T_N - mat.T_N);
        c.check(dr < 1e-10 && dt < 1e-10, "N = %ld: rational vs matrix |dR| %.2e, |dT| %.2e < 1e-10", N, dr, dt);
    }
}

void criterion6(Checker& c) {
    const AtomModel& a = atom_200nm();
    const ModeSolution& m = a.site.mode;
    const double Lambda = bragg_period(m, 2);
    const long N = 1000000;
    const ArrayResponse x = array_response(channel_matrix(a, Channel::X, 0.0, false), m.beta, Lambda, N);
    const ArrayResponse y = array_response(channel_matrix(a, Channel::Y, 0.0, false), m.beta, Lambda, N);
    const CircularResponse circ = circular_response(x, y);
    c.within_rel("P_tot quasicircular", circ.P_tot, 0.543, 0.02);
    c.within_rel("P_tot x", x.P_tot, 0.087, 0.02);
    c.within_rel("P_tot y", y.P_tot, 1.000, 0.02);
    const double id = std::abs(circ.P_tot - (x.P_tot + y.P_tot) / 2);
    c.check(id < 1e-12, "P_tot circ - (P_tot x + P_tot y)/2 = %.2e < 1e-12", id);
}

void criterion7(Checker& c) {
    const AtomModel& a = atom_200nm();
    const double Lambda = bragg_period(a.site.mode, 2);
    const GapReport gx = gap_report(a, Channel::X, Lambda, 0.0);
    const GapReport gy = gap_report(a, Channel::Y, Lambda, 0.0);
    c.within_rel("x Delta_min / 2pi [GHz]", gx.Delta_min / kTwoPiGHz, 1.19, 0.05);
    c.within_rel("x Delta_max / 2pi [GHz]", gx.Delta_max / kTwoPiGHz, 2.16, 0.05);
    c.within_rel("y Delta_max / 2pi [GHz]", gy.Delta_max / kTwoPiGHz, 1.46, 0.05);
    c.within_rel("x N_gap", gx.N_gap, 43000, 0.10);
    c.within_rel("y N_gap", gy.N_gap, 33000, 0.10);
    // Lossless numeric edges agree with the closed forms.
    bool found = false;
    for (const auto& [lo, hi] : gx.numeric_gaps)
        if (lo > 0) {
            found = true;
            c.check(std::abs(lo - gx.Delta_min) < 0.01 * gx.Delta_min && std::abs(hi - gx.Delta_max) < 0.01 * gx.Delta_max,
                    "x numeric gap [%.4f, %.4f] GHz matches closed form within 1%%", lo / kTwoPiGHz, hi / kTwoPiGHz);
        }
    c.check(found, "x numeric gap above resonance located");
}

void criterion8(Checker& c) {
    const AtomModel& a = atom_200nm();
    const double Lambda = bragg_period(a.site.mode, 2);
    const double flat = measure_delta_flat(a, Lambda, 150000);
    c.within_rel("measured delta_flat / 2pi [MHz]", flat / kTwoPiMHz, 111, 0.25);
}

void criterion9(Checker& c) {
    const AtomModel& a = atom_200nm();
    const double Lambda = bragg_period(a.site.mode, 2);
    c.within_rel("x gap delay [ns]", gap_report(a, Channel::X, Lambda, 0.0).tau_delay * 1e9, 0.5, 0.30);
    c.within_rel("y gap delay [ns]", gap_report(a, Channel::Y, Lambda, 0.0).tau_delay * 1e9, 0.3, 0.30);
}

void criterion10(Checker& c) {
    const double a0 = fiber().radius;
    std::vector<const AtomModel*> atoms;
    for (double x : {1.0 + 1e-12, 1.4, 1.8, 2.5}) atoms.push_back(&atom_at(x * a0));
    const std::vector<double> deltas{-50 * kTwoPiMHz, -3 * kTwoPiMHz, 0.0, 7 * kTwoPiMHz, 400 * kTwoPiMHz};

    double det_err = 0, cross = 0, ty_err = 0, c17 = 0;
    for (const AtomModel* a : atoms)
        for (double d : deltas) {
            for (Channel xi : {Channel::X, Channel::Y})
                det_err = std::max(det_err, std::abs(channel_matrix(*a, xi, d, false).determinant() - 1.0));
            const ScatteringMatrix s = scattering_matrix(*a, d, Basis::Linear);
            for (int i : {0, 2})
                for (int j : {1, 3}) cross = std::max({cross, std::abs(s.S(i, j)), std::abs(s.S(j, i))});
            const PolarizationChannel y = single_atom_transfer(Channel::Y, channel_scalars(*a, d));
            ty_err = std::max(ty_err, std::abs(y.T - 1.0 - y.R));
            const ScatteringMatrix closed = scattering_closed_form(*a, d);
            c17 = std::max(c17, (s.S - closed.S).cwiseAbs().maxCoeff() / closed.S.cwiseAbs().maxCoeff());
        }
    c.check(det_err < 1e-12, "det M = 1: max |det M - 1| %.2e < 1e-12", det_err);
    c.check(cross < 1e-12, "x-y cross scattering max |S| %.2e < 1e-12", cross);
    c.check(ty_err < 1e-12, "y channel T = 1 + R: max error %.2e", ty_err);
    c.check(c17 < 1e-12, "sublevel sum vs closed-form S: max relative difference %.2e < 1e-12", c17);

    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double w_err = 0, rec_err = 0, power_max = 0;
    for (int k = 0; k < 100; ++k) {
        const AtomModel& a = *atoms[k % atoms.size()];
        const Channel xi = k % 2 ? Channel::Y : Channel::X;
        const double d = (uni(rng) - 0.5) * 2 * 100 * kTwoPiMHz;
        const double Lambda = (300 + 700 * uni(rng)) * 1e-9;
        const long N = 1 + long(1999 * uni(rng));
        const Eigen::Matrix2cd M = channel_matrix(a, xi, d, false);
        const double beta = beta_at_detuning(a.site.mode, d);
        const Scaled<Eigen::Matrix2cd> prod = total_transfer_product(M, free_propagator(beta, Lambda), N);
        const ClosedTransfer closed = total_transfer_closed(M, beta, Lambda, N);
        const Eigen::Matrix2cd diff =
            closed.W.matrix * std::exp(closed.W.log_scale - prod.log_scale) - prod.matrix;
        w_err = std::max(w_err, diff.norm() / prod.matrix.norm());

        const ArrayResponse resp = array_response(M, beta, Lambda, N);
        power_max = std::max(power_max, resp.reflectivity + resp.transmittivity);
        if (k < 20) {
            const PolarizationChannel ch = single_atom_transfer(xi, channel_scalars(a, d));
            cplx RN = ch.R, TN = ch.T;
            const long steps = std::min(N, 300L);
            for (long n = 1; n < steps; ++n) std::tie(RN, TN) = recurrence_step(RN, TN, ch.R, ch.T, beta, Lambda);
            const ArrayResponse ref = array_response(M, beta, Lambda, steps);
            rec_err = std::max({rec_err, std::abs(RN - ref.R_N), std::abs(TN - ref.T_N)});
        }
    }
    c.check(w_err < 1e-9, "closed-form vs product W over 100 random draws: max relative %.2e < 1e-9", w_err);
    c.check(rec_err < 1e-10, "ray-optics recurrence vs closed form: max |diff| %.2e < 1e-10", rec_err);
    c.check(power_max <= 1 + 1e-12, "|R_N|^2 + |T_N|^2 max %.12f <= 1", power_max);

    // Free-space oracle from the J-level dipole alone.
    const HyperfineTransition t = cesium_d2_default();
    const double dJ = t.reduced_dipole_J;
    const double oracle = std::pow(t.omega0, 3) * dJ * dJ /
                          (3 * phys::pi * phys::eps0 * phys::hbar * std::pow(phys::c, 3) * (2 * t.J_prime + 1));
    const double far = gamma_rad(fiber(), t, 10 * a0).averaged;
    c.within_rel("gamma_rad(r = 10a) / free-space oracle", far / oracle, 1.0, 0.02);

    double orth = 0;
    for (double j1 : {0.5, 1.0, 2.0, 3.5})
        for (double j2 : {0.5, 1.0, 1.5, 4.0})
            for (double j3 = std::abs(j1 - j2); j3 <= j1 + j2 + 1e-9; j3 += 1)
                for (double j3p = std::abs(j1 - j2); j3p <= j1 + j2 + 1e-9; j3p += 1)
                    for (double m3 = -std::min(j3, j3p); m3 <= std::min(j3, j3p) + 1e-9; m3 += 1) {
                        double sum = 0;
                        for (double m1 = -j1; m1 <= j1 + 1e-9; m1 += 1) {
                            const double m2 = -m3 - m1;
                            if (std::abs(m2) > j2 + 1e-9) continue;
                            sum += num::wigner_3j(j1, j2, j3, m1, m2, m3) * num::wigner_3j(j1, j2, j3p, m1, m2, m3);
                        }
                        const double expect = std::abs(j3 - j3p) < 1e-9 ? 1.0 / (2 * j3 + 1) : 0.0;
                        orth = std::max(orth, std::abs(sum - expect));
                    }
    c.check(orth < 1e-10, "3j orthogonality sums: max error %.2e < 1e-10", orth);

    double wr = 0;
    for (int n = 0; n <= 4; ++n)
        for (double x : {0.3, 1.3, 2.5, 7.0}) {
            wr = std::max(wr, std::abs(num::bessel_j(n, x) * num::bessel_y_prime(n, x) - num::bessel_j_prime(n, x) * num::bessel_y(n, x) -
                                       2 / (phys::pi * x)) * x);
            wr = std::max(wr, std::abs(num::bessel_i(n, x) * num::bessel_k_prime(n, x) - num::bessel_i_prime(n, x) * num::bessel_k(n, x) +
                                       1 / x) * x);
            const cplx h1 = num::hankel(1, n, x), h2 = num::hankel(2, n, x);
            const cplx w = h1 * num::hankel_prime(2, n, x) - num::hankel_prime(1, n, x) * h2;
            wr = std::max(wr, std::abs(w + cplx(0, 4 / (phys::pi * x))) * x);
        }
    c.check(wr < 1e-12, "Bessel/Hankel Wronskians (scaled by x): max error %.2e < 1e-12", wr);
}

struct Entry {
    int id;
    const char* title;
    std::function<void(Checker&)> run;
};

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& out, int only) {
    const std::vector<Entry> entries{
        {1, "mode solver validity", criterion1},
        {2, "optical depth per atom at r/a = 1.8", criterion2},
        {3, "single-atom peak reflectivity", criterion3},
        {4, "Bragg x-channel asymptote", criterion4},
        {5, "Bragg y-channel reflection", criterion5},
        {6, "P_tot limits at Bragg, N = 1e6", criterion6},
        {7, "band-gap edges and thresholds", criterion7},
        {8, "central-plateau half-width", criterion8},
        {9, "group delay in the gaps", criterion9},
        {10, "property suite", criterion10},
    };
    std::vector<CriterionResult> results;
    for (const Entry& e : entries) {
        if (only && e.id != only) continue;
        Checker c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            e.run(c);
        } catch (const std::exception& ex) {
            c.check(false, "exception: %s", ex.what());
        }
        CriterionResult r;
        r.id = e.id;
        r.title = e.title;
        r.pass = c.ok;
        r.details = c.lines;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char head[160];
        std::snprintf(head, sizeof head, "%s criterion %2d: %s (%.2f s)", r.pass ? "PASS" : "FAIL", r.id,
                      r.title.c_str(), r.seconds);
        out << head << "\n";
        for (const auto& l : r.details) out << "      " << l << "\n";
        out.flush();
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace nfa
