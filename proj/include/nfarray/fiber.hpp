#pragma once

#include <array>
#include <stdexcept>

#include "nfarray/numerics.hpp"

namespace nfa {

struct FiberSpec {
    double radius = 250e-9;  // m
    double n1 = 1.45;        // core
    double n2 = 1.0;         // cladding (vacuum)

    void validate() const;
    double index_at(double r) const { return r < radius ? n1 : n2; }
};

// Malitson three-term Sellmeier fit for fused silica; wavelength in metres.
double sellmeier_silica(double wavelength);

struct ModeCutoffError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModeSolution {
    double omega = 0;     // rad/s
    double beta = 0;      // 1/m
    double h = 0;         // interior transverse wavenumber
    double q = 0;         // exterior decay constant
    double s_param = 0;
    double norm_C = 0;    // fixed by the unit-power normalization
    double v_group = 0;
    double v_phase = 0;
    double residual = 0;  // relative residual of the eigenvalue equation
    bool single_mode = true;

    double k() const;
};

// Relative residual |lhs - rhs| / max(|lhs|, |rhs|) of the HE11 eigenvalue
// equation at a trial propagation constant.
double eigen_residual(const FiberSpec& fiber, double omega, double beta);

// Propagation constant only (largest root of the eigenvalue equation).
double solve_beta(const FiberSpec& fiber, double omega, double root_rel_tol = 1e-14);

ModeSolution solve_mode(const FiberSpec& fiber, double omega, double root_rel_tol = 1e-14);

// Cylindrical components (r, phi, z) of a complex vector.
struct CylVec {
    cplx r{}, phi{}, z{};
    double norm2() const { return std::norm(r) + std::norm(phi) + std::norm(z); }
};

// Reference profile of the forward counterclockwise mode.
CylVec profile_reference(const ModeSolution& mode, const FiberSpec& fiber, double r);
CylVec profile_interior(const ModeSolution& mode, const FiberSpec& fiber, double r);
CylVec profile_exterior(const ModeSolution& mode, const FiberSpec& fiber, double r);

enum class Pol { CircPlus, CircMinus, X, Y };
const char* to_string(Pol p);

CylVec profile_polarized(const ModeSolution& mode, const FiberSpec& fiber, double r, double phi,
                         int f, Pol p);

struct SphericalMagnitudes {
    double e0 = 0, e_plus = 0, e_minus = 0;
};
SphericalMagnitudes spherical_magnitudes(const CylVec& reference);

// Spherical tensor components indexed by q + 1: {V_-1, V_0, V_+1}.
std::array<cplx, 3> spherical_components(const CylVec& v, double phi);

// Independent normalization check: 2 pi int n^2 |e|^2 r dr with the
// normalized profile (should be 1).
double normalization_integral(const ModeSolution& mode, const FiberSpec& fiber, double rel_tol);

}  // namespace nfa
