#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nfarray/scattering.hpp"

namespace nfa {

struct SingularInputOutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Periodic array of identical atoms at (r0, phi = 0).
struct ArrayScenario {
    long N = 1;
    double Lambda = 0;  // m
    double r0 = 0;      // m
    double delta = 0;   // rad/s

    void validate() const;
};

// Lambda = n pi / beta0.
double bragg_period(const ModeSolution& mode, int order);

// beta(omega0 + delta) to first order: beta0 + delta / v_g.
double beta_at_detuning(const ModeSolution& mode, double delta);

Eigen::Matrix2cd free_propagator(double beta, double Lambda);
Eigen::Matrix4cd free_propagator4(double beta, double Lambda);

// W = matrix * exp(log_scale); entries of `matrix` are kept O(1).
template <class Mat>
struct Scaled {
    Mat matrix;
    double log_scale = 0;
    Mat value() const { return matrix * std::exp(log_scale); }
};

// W = (M F)^{N-1} M by repeated squaring with running rescale.
Scaled<Eigen::Matrix2cd> total_transfer_product(const Eigen::Matrix2cd& M, const Eigen::Matrix2cd& F,
                                                long N);
Scaled<Eigen::Matrix4cd> total_transfer_product(const Eigen::Matrix4cd& M, const Eigen::Matrix4cd& F,
                                                long N);

// M_N F_{N-1} ... F_1 M_1 for per-atom matrices; Fs.size() == Ms.size() - 1.
Eigen::Matrix4cd inhomogeneous_product(const std::vector<Eigen::Matrix4cd>& Ms,
                                       const std::vector<Eigen::Matrix4cd>& Fs);

// theta with cosh(theta) = c, branch Re > 0 or (Re = 0, Im >= 0); accurate
// for theta near 0 and near i pi.
cplx acosh_branch(cplx c);

// cosh(theta) = (M11 e^{i beta Lambda} + M22 e^{-i beta Lambda}) / 2 with Re(theta) >= 0.
cplx transfer_theta(const Eigen::Matrix2cd& M, double beta, double Lambda);

// s_N = sinh(N theta)/sinh(theta) in overflow-free form. With
// theta = vartheta + i k pi: s_N = exp(log_factor) * sN and
// s_{N-1} = exp(log_factor) * sNm1. Near sinh(theta) = 0 the limit
// N (-1)^{k(N-1)} is used.
struct SinhRatios {
    cplx theta{};
    long k = 0;
    cplx vartheta{};
    cplx sN{}, sNm1{};
    cplx log_factor{};
    bool degenerate = false;
};
SinhRatios sinh_ratios(cplx theta, long N);

struct ClosedTransfer {
    cplx theta{};
    Scaled<Eigen::Matrix2cd> W;
};

// W from the sinh(N theta) closed form; requires M21 = -M12.
ClosedTransfer total_transfer_closed(const Eigen::Matrix2cd& M, double beta, double Lambda, long N);

struct ArrayResponse {
    cplx R_N{}, T_N{};
    double reflectivity = 0, transmittivity = 0;
    double P_tot = 0;
    cplx theta{};
};

// From a (possibly rescaled) total transfer matrix.
ArrayResponse response_from_W(const Scaled<Eigen::Matrix2cd>& W);

// Closed-form route from single-atom (R, T) and theta; stable for N up to 1e6+.
ArrayResponse array_response(const Eigen::Matrix2cd& M, double beta, double Lambda, long N);

// One step of the ray-optics recurrence: (R_N, T_N) -> (R_{N+1}, T_{N+1}).
std::pair<cplx, cplx> recurrence_step(cplx RN, cplx TN, cplx R, cplx T, double beta, double Lambda);

// Quasicircular input as the equal-weight superposition of the x and y channels.
struct CircularResponse {
    ArrayResponse x, y;
    double P_forward_same = 0, P_forward_opposite = 0;   // output l = input l, l = -input l
    double P_backward_same = 0, P_backward_opposite = 0;
    double P_tot = 0;
};
CircularResponse circular_response(const ArrayResponse& x, const ArrayResponse& y);

// Bragg-resonance forms at beta Lambda = n pi for a channel with single-atom R, T.
struct BraggResult {
    cplx R_N{}, T_N{};
    cplx vartheta{};
};
BraggResult bragg_response(const PolarizationChannel& ch, long N, int order);

// Limit N -> infinity of the x channel at exact Bragg: R / (1 - T e^{-vartheta}).
cplx bragg_r_infinity(const PolarizationChannel& ch);

// -(|e_r| - |e_z|) / (|e_r| + |e_z|).
double bragg_r_infinity_profile(double er, double ez);

// y channel at Bragg written through the rates.
BraggResult bragg_y_rates(double gamma_1d_y, double gamma, double delta, long N, int order);

// Outgoing amplitudes (X1, X2, X3, X4) given incident (X1_in, X2_in, X3_in, X4_in).
std::array<cplx, 4> input_output_4mode(const Eigen::Matrix4cd& W, const std::array<cplx, 4>& in);

// exp((i B - S / Lambda) L) with B = diag(beta, beta, -beta, -beta).
Eigen::Matrix4cd homogenized_transfer(const Eigen::Matrix4cd& S, double beta, double Lambda, double L);
Eigen::Matrix2cd homogenized_transfer(const Eigen::Matrix2cd& S, double beta, double Lambda, double L);

}  // namespace nfa
