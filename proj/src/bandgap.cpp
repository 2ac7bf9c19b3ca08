#include "nfarray/bandgap.hpp"

#include <iostream>

#include "nfarray/constants.hpp"

namespace nfa {

namespace {

constexpr cplx I(0.0, 1.0);

cplx branch(cplx v) {
    if (v.real() < 0 || (v.real() == 0 && v.imag() < 0)) return -v;
    return v;
}

cplx cosh_vartheta(const Eigen::Matrix2cd& M, double phi) {
    return 0.5 * (M(0, 0) + M(1, 1)) * std::cos(phi) + 0.5 * (M(0, 0) - M(1, 1)) * I * std::sin(phi);
}

}  // namespace

double lattice_detuning(const ModeSolution& mode, double Lambda) {
    const double n = std::max(1.0, std::round(mode.beta * Lambda / phys::pi));
    return (n * phys::pi / Lambda - mode.beta) * mode.v_group;
}

double mismatch_phase(const AtomModel& atom, double Lambda, double delta, double delta_lat) {
    return (delta - delta_lat) * Lambda / atom.site.mode.v_group;
}

Eigen::Matrix2cd channel_matrix(const AtomModel& atom, Channel xi, double delta, bool lossless) {
    ChannelScalars s = channel_scalars(atom, delta);
    if (lossless) {
        s.S_r = cplx(0, s.S_r.imag());
        s.S_phi = cplx(0, s.S_phi.imag());
        s.S_z = cplx(0, s.S_z.imag());
    }
    return single_atom_transfer(xi, s).M;
}

cplx bloch_theta(const Eigen::Matrix2cd& M, double phi) {
    if (std::abs(phi) >= 0.1) throw std::domain_error("bloch_theta: |phi| must be < 0.1");
    return acosh_branch(cosh_vartheta(M, phi));
}

cplx bloch_theta_quadratic(const Eigen::Matrix2cd& M, double phi) {
    return branch(std::sqrt(M(0, 0) + M(1, 1) - 2.0 + I * (M(0, 0) - M(1, 1)) * phi - phi * phi));
}

cplx bloch_theta_x_approx(const ChannelScalars& s, double phi) {
    return branch(std::sqrt(4.0 * s.S_r * s.S_z - 2.0 * I * (s.S_r + s.S_z) * phi - phi * phi));
}

cplx bloch_theta_y_approx(const ChannelScalars& s, double phi) {
    return branch(std::sqrt(-2.0 * I * s.S_phi * phi - phi * phi));
}

cplx bloch_theta_at(const AtomModel& atom, Channel xi, double Lambda, double delta, double delta_lat,
                    bool lossless) {
    return bloch_theta(channel_matrix(atom, xi, delta, lossless),
                       mismatch_phase(atom, Lambda, delta, delta_lat));
}

cplx r_infinity(const AtomModel& atom, Channel xi, double Lambda, double delta, double delta_lat) {
    const PolarizationChannel ch = single_atom_transfer(xi, channel_scalars(atom, delta));
    const double phi = mismatch_phase(atom, Lambda, delta, delta_lat);
    const cplx v = bloch_theta(ch.M, phi);
    return ch.R / (1.0 - ch.T * std::exp(I * phi - v));
}

double group_delay(const AtomModel& atom, Channel xi, double Lambda, double delta, double delta_lat,
                   double step) {
    const cplx hi = r_infinity(atom, xi, Lambda, delta + step, delta_lat);
    const cplx lo = r_infinity(atom, xi, Lambda, delta - step, delta_lat);
    return std::arg(hi / lo) / (2 * step);
}

std::vector<std::pair<double, double>> numeric_gap_intervals(const AtomModel& atom, Channel xi,
                                                             double Lambda, double delta_lat,
                                                             double half_span, int grid) {
    auto excess = [&](double d) {
        const Eigen::Matrix2cd M = channel_matrix(atom, xi, d, true);
        return std::abs(cosh_vartheta(M, mismatch_phase(atom, Lambda, d, delta_lat)).real()) - 1.0;
    };
    auto edge = [&](double a, double b) {
        const bool a_in = excess(a) > 0;
        for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (a + b);
            ((excess(m) > 0) == a_in ? a : b) = m;
        }
        return 0.5 * (a + b);
    };
    const double centre = delta_lat / 2;
    std::vector<std::pair<double, double>> gaps;
    double prev_d = centre - half_span;
    bool prev_in = excess(prev_d) > 0;
    double open = prev_in ? prev_d : 0.0;
    for (int i = 1; i < grid; ++i) {
        const double d = centre - half_span + 2 * half_span * i / (grid - 1);
        const bool in = excess(d) > 0;
        if (in != prev_in) {
            const double e = edge(prev_d, d);
            if (in) open = e;
            else gaps.emplace_back(open, e);
        }
        prev_d = d;
        prev_in = in;
    }
    if (prev_in) gaps.emplace_back(open, prev_d);
    return gaps;
}

double gap_averaged_delay(const AtomModel& atom, Channel xi, double Lambda, double delta_lat,
                          double lo, double hi, int samples) {
    // Unwrapped phase accumulated across [lo, hi], divided by the width.
    double phase = 0;
    cplx prev = r_infinity(atom, xi, Lambda, lo, delta_lat);
    for (int i = 1; i < samples; ++i) {
        const cplx cur = r_infinity(atom, xi, Lambda, lo + (hi - lo) * i / (samples - 1), delta_lat);
        phase += std::arg(cur / prev);
        prev = cur;
    }
    return phase / (hi - lo);
}

GapReport gap_report(const AtomModel& atom, Channel xi, double Lambda, double delta_lat, long N_flat) {
    const auto& s = atom.site;
    const double u0 = atom.rates.u0, gamma = atom.rates.gamma_total, vg = s.mode.v_group;
    const double dl2 = delta_lat * delta_lat / 4;
    GapReport g;
    g.xi = xi;
    g.delta_lat = delta_lat;
    g.omega_c_offset = delta_lat / 2;
    double strength = 0;
    if (xi == Channel::X) {
        g.Delta_max = std::sqrt(dl2 + u0 * s.er * s.er * vg / Lambda);
        g.Delta_min = std::sqrt(dl2 + u0 * s.ez * s.ez * vg / Lambda);
        g.Delta_gap = g.Delta_max - g.Delta_min;
        g.N_gap = std::sqrt(vg / (u0 * Lambda)) / (s.er - s.ez);
        g.delta_mid = std::sqrt(u0 * s.er * s.ez * vg / Lambda);
        const double loss = 1 - gamma / (2 * std::sqrt(u0 * vg / Lambda) * (s.er - s.ez));
        const double a = std::sqrt(s.er), b = std::sqrt(s.ez);
        g.R_gap_plus = -cplx(a, b) / cplx(a, -b) * loss;
        g.R_gap_minus = -cplx(a, -b) / cplx(a, b) * loss;
        g.delta_flat_estimate = std::sqrt(atom.rates.gamma_s * gamma * double(N_flat)) / 2;
        strength = std::sqrt(u0 * s.ez * s.ez * vg / Lambda);
    } else {
        g.Delta_max = std::sqrt(dl2 + u0 * s.ephi * s.ephi * vg / Lambda);
        g.Delta_min = 0;
        g.Delta_gap = g.Delta_max - std::abs(delta_lat) / 2;
        g.N_gap = std::sqrt(4 * vg / (3 * u0 * Lambda)) / s.ephi;
        g.delta_mid = 0.5 * std::sqrt(u0 * s.ephi * s.ephi * vg / Lambda);
        const double loss = 1 - gamma / std::sqrt(3 * u0 * s.ephi * s.ephi * vg / Lambda);
        g.R_gap_plus = -cplx(1, std::sqrt(3.0)) / 2.0 * loss;
        g.R_gap_minus = -cplx(1, -std::sqrt(3.0)) / 2.0 * loss;
        strength = std::sqrt(u0 * s.ephi * s.ephi * vg / Lambda);
    }
    g.validity_ratio = strength / std::max(gamma, std::abs(delta_lat));
    if (g.validity_ratio < 10)
        std::cerr << "warning: gap validity ratio " << g.validity_ratio << " is below 10\n";

    g.R_inf_plus = r_infinity(atom, xi, Lambda, g.omega_c_offset + g.delta_mid, delta_lat);
    g.R_inf_minus = r_infinity(atom, xi, Lambda, g.omega_c_offset - g.delta_mid, delta_lat);

    g.numeric_gaps = numeric_gap_intervals(atom, xi, Lambda, delta_lat,
                                           1.5 * g.Delta_max + std::abs(delta_lat));
    // Delay averaged over the gap that contains +delta_mid.
    const double probe = g.omega_c_offset + g.delta_mid;
    for (const auto& [lo, hi] : g.numeric_gaps)
        if (lo <= probe && probe <= hi) g.tau_delay = gap_averaged_delay(atom, xi, Lambda, delta_lat, lo, hi);
    return g;
}

double measure_delta_flat(const AtomModel& atom, double Lambda, long N, double rel) {
    const ModeSolution& mode = atom.site.mode;
    const double delta_lat = lattice_detuning(mode, Lambda);
    auto departs = [&](double d) {
        const Eigen::Matrix2cd M = channel_matrix(atom, Channel::X, d, false);
        const double refl = array_response(M, beta_at_detuning(mode, d), Lambda, N).reflectivity;
        const double rinf = std::norm(r_infinity(atom, Channel::X, Lambda, d, delta_lat));
        return std::abs(refl - rinf) > rel * rinf;
    };
    if (departs(0.0)) return 0.0;
    const double step = 2 * phys::pi * 0.5e6, limit = 2 * phys::pi * 5e9;
    for (double d = step; d < limit; d += step) {
        if (!departs(d)) continue;
        double a = d - step, b = d;
        for (int it = 0; it < 50; ++it) {
            const double m = 0.5 * (a + b);
            (departs(m) ? b : a) = m;
        }
        return 0.5 * (a + b);
    }
    return limit;
}

}  // namespace nfa
