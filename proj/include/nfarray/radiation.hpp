#pragma once

#include <array>

#include <Eigen/Dense>

#include "nfarray/atoms.hpp"
#include "nfarray/fiber.hpp"

namespace nfa {

// Radiation mode (omega, beta, m, l) of the fiber, normalized to unit
// flux constant. Exterior fields are kept in two equivalent forms: the
// Hankel coefficients C_j, D_j and the real-basis coefficients multiplying
// J_m(qr) and Y_m(qr), which stay accurate when C_1 H^(1) + C_2 H^(2)
// cancels at large |m|.
struct RadiationMode {
    double omega = 0, beta = 0, h = 0, q = 0;
    int m = 0;
    int l = 1;
    double eta = 0;
    cplx A{}, B{};
    cplx C1{}, C2{}, D1{}, D2{};
    cplx cJ{}, cY{}, dJ{}, dY{};  // e_z = cJ J_m + cY Y_m, likewise for the D-sum
};

RadiationMode make_radiation_mode(const FiberSpec& fiber, double omega, double beta, int m, int l);

// Interior branch from the Bessel-J form, exterior from the J/Y form.
CylVec radiation_profile(const RadiationMode& mode, const FiberSpec& fiber, double r);

// Exterior branch evaluated literally with Hankel functions (small |m| only).
CylVec radiation_profile_hankel(const RadiationMode& mode, const FiberSpec& fiber, double r);

// Coefficient of delta(omega - omega') in the overlap of two modes with equal
// (beta, m); equals 1 on the diagonal for normalized modes.
cplx radiation_overlap(const FiberSpec& fiber, const RadiationMode& a, const RadiationMode& b);

// C_1, C_2, D_1, D_2 for given (A, B) evaluated exactly as the conjugated-Hankel
// interface formulas read (no rescaling; moderate |m| only).
std::array<cplx, 4> hankel_coefficients_literal(const FiberSpec& fiber, double omega, double beta,
                                                int m, cplx A, cplx B);

struct RadiationOptions {
    int m_max = 30;
    double m_truncation_tol = 1e-6;
    int gl_order = 64;
    int initial_panels = 8;
    int max_panels = 128;
    double rel_change = 1e-4;
};

// Gamma_{qq'} = sum_{m,l} int dbeta e_{-q} e_{-q'}^*, index q + 1.
struct RadiationTensor {
    Eigen::Matrix3cd gamma = Eigen::Matrix3cd::Zero();
    int panels = 0;
    int m_used = 0;
};

RadiationTensor radiation_tensor(const FiberSpec& fiber, double omega, double r,
                                 const RadiationOptions& opt = {});

// Fixed panel count, no adaptivity (used by the convergence loop and tests).
RadiationTensor radiation_tensor_fixed(const FiberSpec& fiber, double omega, double r, int panels,
                                       const RadiationOptions& opt = {});

struct RadiationRates {
    Eigen::MatrixXcd per_pair;  // gamma^(rad)_{ee'}, rows/cols e = M' + F'
    double averaged = 0;        // (1/(2F'+1)) sum_e gamma_ee
    RadiationTensor tensor;
};

RadiationRates gamma_rad(const FiberSpec& fiber, const HyperfineTransition& t, double r,
                         double phi = 0.0, const RadiationOptions& opt = {});

// Memoized gamma_rad keyed on every input; safe for concurrent callers.
RadiationRates gamma_rad_cached(const FiberSpec& fiber, const HyperfineTransition& t, double r,
                                const RadiationOptions& opt = {});

// Free-space rate of the F' manifold from the same reduced dipole.
double free_space_rate(const HyperfineTransition& t);

}  // namespace nfa
