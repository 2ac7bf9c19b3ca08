#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "nfarray/emission.hpp"

namespace nfa {

struct InvalidRatesError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularTransferError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Basis { Linear, Circular };

// Single-atom scattering matrix over the four guided modes, ordered
// (+,p), (+,p_bar), (-,p), (-,p_bar) with p = x (linear) or l = + (circular).
struct ScatteringMatrix {
    Eigen::Matrix4cd S = Eigen::Matrix4cd::Zero();
    Basis basis = Basis::Linear;
    double delta = 0;  // rad/s
};

// Explicit sublevel sum with flat ground populations.
ScatteringMatrix scattering_matrix(const AtomModel& atom, double delta, Basis basis = Basis::Linear);

// Closed form in the linear basis from u0 and the profile magnitudes.
ScatteringMatrix scattering_closed_form(const AtomModel& atom, double delta);

// Direction sign of mode index k in the 4-mode ordering.
inline int mode_direction(int k) { return k < 2 ? 1 : -1; }

// 2 Re(f S_kk) for mode index k.
double optical_depth(const ScatteringMatrix& s, int k);

// 4 gamma / (gamma^2 + 4 delta^2) * sum_eg p_g |G|^2 for one coupling table.
double optical_depth_from_rates(const CouplingTable& table, double gamma_total, double delta);

enum class Channel { X, Y };
const char* to_string(Channel c);

struct ChannelScalars {
    cplx S_r{}, S_phi{}, S_z{};
};

// S_r = u0 |e_r|^2 / (gamma - 2 i delta), likewise for phi and z.
ChannelScalars channel_scalars(const AtomModel& atom, double delta);

struct PolarizationChannel {
    Channel xi = Channel::X;
    ChannelScalars s;
    Eigen::Matrix2cd M = Eigen::Matrix2cd::Identity();
    cplx R{}, T{1.0, 0.0};
};

// Transfer matrix and single-atom R, T from the channel closed forms.
PolarizationChannel single_atom_transfer(Channel xi, const ChannelScalars& s);

// Generic 2x2 transfer matrix from the four channel scattering elements.
Eigen::Matrix2cd transfer_from_S(cplx Spp, cplx Spm, cplx Smp, cplx Smm);

// 2x2 transfer matrix of channel xi extracted from a linear-basis S.
Eigen::Matrix2cd channel_transfer(const ScatteringMatrix& s, Channel xi);

// M = (1 + S^(-))^{-1} (1 - S^(+)).
Eigen::Matrix4cd general_transfer_4x4(const ScatteringMatrix& s);

// R = -M21/M22, T = 1/M22.
inline cplx reflection_of(const Eigen::Matrix2cd& M) { return -M(1, 0) / M(1, 1); }
inline cplx transmission_of(const Eigen::Matrix2cd& M) { return 1.0 / M(1, 1); }

}  // namespace nfa
