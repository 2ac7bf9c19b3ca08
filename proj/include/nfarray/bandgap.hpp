#pragma once

#include <utility>
#include <vector>

#include "nfarray/array.hpp"

namespace nfa {

// delta_lat = omega_lat - omega0 for the Bragg order nearest beta0 Lambda / pi.
double lattice_detuning(const ModeSolution& mode, double Lambda);

// phi = (delta - delta_lat) Lambda / v_g, the mismatch of beta_L Lambda from n pi.
double mismatch_phase(const AtomModel& atom, double Lambda, double delta, double delta_lat);

// Single-atom transfer matrix of a channel; `lossless` drops Re(S_r), Re(S_phi), Re(S_z).
Eigen::Matrix2cd channel_matrix(const AtomModel& atom, Channel xi, double delta, bool lossless);

// Exact: cosh(vartheta) = (M11+M22)/2 cos(phi) + i (M11-M22)/2 sin(phi).
cplx bloch_theta(const Eigen::Matrix2cd& M, double phi);
// Second-order expansion of the above.
cplx bloch_theta_quadratic(const Eigen::Matrix2cd& M, double phi);
// Channel approximations: sqrt(4 S_r S_z - 2i(S_r+S_z)phi - phi^2) and sqrt(-2i S_phi phi - phi^2).
cplx bloch_theta_x_approx(const ChannelScalars& s, double phi);
cplx bloch_theta_y_approx(const ChannelScalars& s, double phi);

cplx bloch_theta_at(const AtomModel& atom, Channel xi, double Lambda, double delta, double delta_lat,
                    bool lossless = false);

// Infinite-array reflection R / (1 - T e^{i phi - vartheta}).
cplx r_infinity(const AtomModel& atom, Channel xi, double Lambda, double delta, double delta_lat);

// d arg(R_inf) / d omega by central difference.
double group_delay(const AtomModel& atom, Channel xi, double Lambda, double delta, double delta_lat,
                   double step = 2 * 3.141592653589793 * 1e6);

struct GapReport {
    Channel xi = Channel::X;
    double delta_lat = 0;
    double omega_c_offset = 0;  // omega_c - omega0 = delta_lat / 2
    double Delta_max = 0, Delta_min = 0, Delta_gap = 0;
    double N_gap = 0;
    double delta_mid = 0;
    cplx R_gap_plus{}, R_gap_minus{};   // closed forms at +delta_mid and -delta_mid
    cplx R_inf_plus{}, R_inf_minus{};   // exact infinite-array value at the same detunings
    double delta_flat_estimate = 0;     // x only, at the N given to gap_report
    double tau_delay = 0;               // gap-averaged group delay, seconds
    double validity_ratio = 0;          // sqrt(u0|e|^2 v_g/Lambda) / max(gamma, |delta_lat|)
    std::vector<std::pair<double, double>> numeric_gaps;  // lossless Re(vartheta) > 0 intervals
};

GapReport gap_report(const AtomModel& atom, Channel xi, double Lambda, double delta_lat,
                     long N_flat = 150000);

// Lossless gap intervals found by bisection on the sign of |Re cosh(vartheta)| - 1.
std::vector<std::pair<double, double>> numeric_gap_intervals(const AtomModel& atom, Channel xi,
                                                             double Lambda, double delta_lat,
                                                             double half_span, int grid = 20001);

// Mean group delay over [lo, hi]: accumulated arg(R_inf) divided by hi - lo.
double gap_averaged_delay(const AtomModel& atom, Channel xi, double Lambda, double delta_lat,
                          double lo, double hi, int samples = 2001);

// Smallest |delta| > 0 at which |R_N|^2 departs from |R_inf|^2 by `rel` (x channel, Bragg at omega0).
double measure_delta_flat(const AtomModel& atom, double Lambda, long N, double rel = 0.01);

}  // namespace nfa
