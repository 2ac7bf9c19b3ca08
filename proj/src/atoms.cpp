#include "nfarray/atoms.hpp"

#include <cmath>
#include <stdexcept>

#include "nfarray/constants.hpp"
#include "nfarray/numerics.hpp"

namespace nfa {

void HyperfineTransition::validate() const {
    if (std::abs(F - F_prime) > 1) throw std::invalid_argument("|F - F'| must be <= 1");
    auto tri = [](double a, double b, double c) {
        return c <= a + b + 1e-9 && c >= std::abs(a - b) - 1e-9;
    };
    if (!tri(J, I, F) || !tri(J_prime, I, F_prime))
        throw std::invalid_argument("hyperfine levels violate the triangle rule");
    if (!(reduced_dipole_J > 0)) throw std::invalid_argument("reduced dipole must be positive");
    if (!(omega0 > 0)) throw std::invalid_argument("transition frequency must be positive");
}

double HyperfineTransition::wavelength() const { return 2 * phys::pi * phys::c / omega0; }

HyperfineTransition cesium_d2_default() {
    HyperfineTransition t;
    t.omega0 = 2 * phys::pi * phys::c / 852e-9;
    t.reduced_dipole_J = 5.38e-29;
    return t;
}

DipoleElement dipole_component(const HyperfineTransition& t, int M, int Mp) {
    DipoleElement d{M, Mp, Mp - M, 0.0};
    if (std::abs(d.q) > 1 || std::abs(M) > t.F || std::abs(Mp) > t.F_prime) return d;
    const double phase_exp = t.I + t.J_prime - Mp;
    const double phase = (std::lround(phase_exp) % 2 == 0) ? 1.0 : -1.0;
    const double six = num::wigner_6j(t.J_prime, t.F_prime, t.I, t.F, t.J, 1);
    const double three = num::wigner_3j(t.F, 1, t.F_prime, M, d.q, -Mp);
    d.value = phase * t.reduced_dipole_J * std::sqrt((2.0 * t.F + 1) * (2.0 * t.F_prime + 1)) *
              six * three;
    return d;
}

double reduced_dipole_F(const HyperfineTransition& t) {
    const double six = num::wigner_6j(t.F, 1, t.F_prime, t.J_prime, t.I, t.J);
    return std::sqrt((2.0 * t.F + 1) * (2.0 * t.F_prime + 1)) * std::abs(six) * t.reduced_dipole_J;
}

DipoleTable::DipoleTable(const HyperfineTransition& t)
    : F_(t.F), Fp_(t.F_prime), n_e_(t.excited_count()), n_g_(t.ground_count()),
      values_(std::size_t(n_e_) * n_g_, 0.0) {
    for (int ie = 0; ie < n_e_; ++ie)
        for (int ig = 0; ig < n_g_; ++ig) {
            const DipoleElement d = dipole_component(t, ig - F_, ie - Fp_);
            values_[ie * n_g_ + ig] = d.value;
            if (d.value != 0.0) nonzero_.push_back(d);
        }
}

}  // namespace nfa
