#pragma once

#include <vector>

namespace nfa {

// Hyperfine transition F -> F' within a J -> J' fine-structure line.
struct HyperfineTransition {
    double J = 0.5;
    double J_prime = 1.5;
    double I = 3.5;
    int F = 4;
    int F_prime = 5;
    double omega0 = 0;            // rad/s
    double reduced_dipole_J = 0;  // <J'||D||J>, C m

    void validate() const;
    double wavelength() const;
    int ground_count() const { return 2 * F + 1; }
    int excited_count() const { return 2 * F_prime + 1; }
};

// Cesium D2, 6S1/2 F=4 -> 6P3/2 F'=5 at 852 nm.
HyperfineTransition cesium_d2_default();

struct DipoleElement {
    int M = 0;        // ground sublevel
    int M_prime = 0;  // excited sublevel
    int q = 0;        // M' - M
    double value = 0; // C m
};

// Spherical component d^(q)_{M'M} with q = M' - M; zero outside |q| <= 1.
DipoleElement dipole_component(const HyperfineTransition& t, int M, int M_prime);

// Reduced element in the F basis.
double reduced_dipole_F(const HyperfineTransition& t);

// Dense table of d^(q)_{eg}, rows e = M' + F', columns g = M + F.
class DipoleTable {
public:
    explicit DipoleTable(const HyperfineTransition& t);
    double operator()(int ie, int ig) const { return values_[ie * n_g_ + ig]; }
    int q(int ie, int ig) const { return (ie - Fp_) - (ig - F_); }
    int n_e() const { return n_e_; }
    int n_g() const { return n_g_; }
    const std::vector<DipoleElement>& nonzero() const { return nonzero_; }

private:
    int F_, Fp_, n_e_, n_g_;
    std::vector<double> values_;
    std::vector<DipoleElement> nonzero_;
};

}  // namespace nfa
