#pragma once

#include <numbers>

namespace nfa::phys {

inline constexpr double pi = std::numbers::pi;
inline constexpr double c = 299792458.0;             // m/s
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double mu0 = 1.0 / (eps0 * c * c);  // H/m
inline constexpr double atomic_unit_dipole = 8.4783536255e-30;  // C m

}  // namespace nfa::phys
