#pragma once

#include <array>

#include <Eigen/Dense>

#include "nfarray/atoms.hpp"
#include "nfarray/fiber.hpp"
#include "nfarray/radiation.hpp"

namespace nfa {

// One atom at (r, phi = 0) next to the fiber, with the guided mode solved at
// the transition frequency.
struct AtomSite {
    FiberSpec fiber;
    HyperfineTransition transition;
    ModeSolution mode;
    double r = 0;
    CylVec profile;           // reference forward counterclockwise profile at r
    double er = 0, ephi = 0, ez = 0;  // |e_r|, |e_phi|, |e_z|
};

AtomSite make_site(const FiberSpec& fiber, const HyperfineTransition& t, double r);

// sqrt(omega / (2 eps0 hbar v_g)); couplings carry units of sqrt(rad/s).
double coupling_prefactor(const AtomSite& site);

// Coupling of every (e, g) pair with one guided mode (f, p); rows e = M' + F',
// columns g = M + F. Zero-phase convention in z.
struct CouplingTable {
    int f = 1;
    Pol p = Pol::CircPlus;
    Eigen::MatrixXcd values;
};

// d_eg . e^(f p) evaluated from the mode vector at azimuth phi.
CouplingTable coupling(const AtomSite& site, int f, Pol p, double phi = 0.0);

// Closed form f^(1+q) e^(-i q pi/2) pref d^(q) |e_-q| for quasicircular modes
// at phi = 0.
CouplingTable coupling_closed_form(const AtomSite& site, int f, Pol l);

// Quasilinear table from the two quasicircular tables of the same f.
CouplingTable coupling_linear(const CouplingTable& plus, const CouplingTable& minus, Pol xi);

// Four tables ordered (+,p), (+,p_bar), (-,p), (-,p_bar) with p = x or circ+.
using CouplingSet = std::array<CouplingTable, 4>;
CouplingSet coupling_set(const AtomSite& site, bool linear_basis);

struct GuidedRates {
    std::array<Eigen::MatrixXd, 4> per_mode;  // gamma^(fp)_eg = |G|^2
    Eigen::MatrixXcd per_pair;                // gamma^(gyd)_ee'
    double forward = 0;                        // averaged, f = +
    double backward = 0;                       // averaged, f = -
    double averaged = 0;                       // (1/(2F'+1)) sum_e gamma^(gyd)_ee
};

GuidedRates guided_rates(const CouplingSet& set);

// u0 = 2 omega D_FF'^2 / (3 (2F+1) eps0 hbar v_g)
double directional_u0(const AtomSite& site);

struct DecayRates {
    double gamma_gyd = 0, gamma_rad = 0, gamma_total = 0;
    double gamma_1d_y = 0, gamma_s = 0, u0 = 0;
};

DecayRates total_rates(const AtomSite& site, const RadiationOptions& opt = {});

// Everything downstream modules need about one trapped atom.
struct AtomModel {
    AtomSite site;
    DecayRates rates;
    CouplingSet linear;    // (+,x), (+,y), (-,x), (-,y)
    CouplingSet circular;  // (+,+), (+,-), (-,+), (-,-)
};

AtomModel build_atom_model(const FiberSpec& fiber, const HyperfineTransition& t, double r,
                           const RadiationOptions& opt = {});

}  // namespace nfa
