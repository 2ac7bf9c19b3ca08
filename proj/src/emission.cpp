#include "nfarray/emission.hpp"

#include <iostream>

#include "nfarray/constants.hpp"

namespace nfa {

namespace {
constexpr cplx I(0.0, 1.0);
}

AtomSite make_site(const FiberSpec& fiber, const HyperfineTransition& t, double r) {
    t.validate();
    AtomSite s;
    s.fiber = fiber;
    s.transition = t;
    s.r = r;
    s.mode = solve_mode(fiber, t.omega0);
    if (r <= fiber.radius) std::cerr << "warning: atom position r = " << r << " is inside the fiber\n";
    s.profile = profile_reference(s.mode, fiber, r);
    s.er = std::abs(s.profile.r);
    s.ephi = std::abs(s.profile.phi);
    s.ez = std::abs(s.profile.z);
    return s;
}

double coupling_prefactor(const AtomSite& s) {
    return std::sqrt(s.mode.omega / (2 * phys::eps0 * phys::hbar * s.mode.v_group));
}

CouplingTable coupling(const AtomSite& s, int f, Pol p, double phi) {
    const DipoleTable d(s.transition);
    const CylVec v = profile_polarized(s.mode, s.fiber, s.r, phi, f, p);
    auto sph = spherical_components(v, phi);
    // Quasicircular modes carry the azimuthal phase e^{i l phi}.
    if (p == Pol::CircPlus || p == Pol::CircMinus) {
        const double l = p == Pol::CircPlus ? 1.0 : -1.0;
        for (auto& c : sph) c *= std::exp(I * l * phi);
    }
    const double pref = coupling_prefactor(s);
    CouplingTable out{f, p, Eigen::MatrixXcd::Zero(d.n_e(), d.n_g())};
    for (int ie = 0; ie < d.n_e(); ++ie)
        for (int ig = 0; ig < d.n_g(); ++ig) {
            const double dv = d(ie, ig);
            if (dv == 0.0) continue;
            const int q = d.q(ie, ig);
            const double sign = (q % 2 == 0) ? 1.0 : -1.0;
            out.values(ie, ig) = pref * sign * dv * sph[1 - q];
        }
    return out;
}

CouplingTable coupling_closed_form(const AtomSite& s, int f, Pol l) {
    if (l != Pol::CircPlus && l != Pol::CircMinus)
        throw std::invalid_argument("closed-form coupling needs a quasicircular mode");
    const DipoleTable d(s.transition);
    const SphericalMagnitudes mag = spherical_magnitudes(s.profile);
    // For l = -1 the two transverse spherical magnitudes swap.
    const double e_plus = l == Pol::CircPlus ? mag.e_plus : mag.e_minus;
    const double e_minus = l == Pol::CircPlus ? mag.e_minus : mag.e_plus;
    const double pref = coupling_prefactor(s);
    CouplingTable out{f, l, Eigen::MatrixXcd::Zero(d.n_e(), d.n_g())};
    for (int ie = 0; ie < d.n_e(); ++ie)
        for (int ig = 0; ig < d.n_g(); ++ig) {
            const double dv = d(ie, ig);
            if (dv == 0.0) continue;
            const int q = d.q(ie, ig);
            const double mag_mq = q == 0 ? mag.e0 : (q == 1 ? e_minus : e_plus);
            const double fpow = ((1 + q) % 2 == 0 || f == 1) ? 1.0 : -1.0;
            out.values(ie, ig) = fpow * std::exp(-I * (q * phys::pi / 2)) * pref * dv * mag_mq;
        }
    return out;
}

CouplingTable coupling_linear(const CouplingTable& plus, const CouplingTable& minus, Pol xi) {
    if (plus.f != minus.f) throw std::invalid_argument("coupling_linear: direction mismatch");
    const double inv = 1.0 / std::sqrt(2.0);
    if (xi == Pol::X) return {plus.f, Pol::X, inv * (plus.values + minus.values)};
    if (xi == Pol::Y) return {plus.f, Pol::Y, (plus.values - minus.values) * (inv / I)};
    throw std::invalid_argument("coupling_linear: xi must be x or y");
}

CouplingSet coupling_set(const AtomSite& s, bool linear_basis) {
    CouplingSet set;
    const std::array<int, 2> dirs{1, -1};
    for (int k = 0; k < 2; ++k) {
        const int f = dirs[k];
        if (linear_basis) {
            set[2 * k] = coupling(s, f, Pol::X);
            set[2 * k + 1] = coupling(s, f, Pol::Y);
        } else {
            set[2 * k] = coupling(s, f, Pol::CircPlus);
            set[2 * k + 1] = coupling(s, f, Pol::CircMinus);
        }
    }
    return set;
}

GuidedRates guided_rates(const CouplingSet& set) {
    GuidedRates out;
    const auto ne = set[0].values.rows();
    out.per_pair = Eigen::MatrixXcd::Zero(ne, ne);
    for (std::size_t k = 0; k < set.size(); ++k) {
        out.per_mode[k] = set[k].values.cwiseAbs2();
        const Eigen::MatrixXcd pair = set[k].values * set[k].values.adjoint();
        out.per_pair += pair;
        const double avg = pair.trace().real() / ne;
        (set[k].f == 1 ? out.forward : out.backward) += avg;
    }
    out.averaged = out.per_pair.trace().real() / ne;
    return out;
}

double directional_u0(const AtomSite& s) {
    const double D = reduced_dipole_F(s.transition);
    return 2 * s.mode.omega * D * D /
           (3.0 * s.transition.ground_count() * phys::eps0 * phys::hbar * s.mode.v_group);
}

DecayRates total_rates(const AtomSite& s, const RadiationOptions& opt) {
    DecayRates d;
    const CouplingSet lin = coupling_set(s, true);
    d.gamma_gyd = guided_rates(lin).averaged;
    d.gamma_rad = gamma_rad_cached(s.fiber, s.transition, s.r, opt).averaged;
    d.gamma_total = d.gamma_gyd + d.gamma_rad;
    d.u0 = directional_u0(s);
    d.gamma_s = d.u0 * s.er * s.ez;
    double y_sum = 0;
    for (int k : {1, 3}) y_sum += lin[k].values.cwiseAbs2().sum();
    d.gamma_1d_y = y_sum / s.transition.ground_count();
    return d;
}

AtomModel build_atom_model(const FiberSpec& fiber, const HyperfineTransition& t, double r,
                           const RadiationOptions& opt) {
    AtomModel m;
    m.site = make_site(fiber, t, r);
    m.rates = total_rates(m.site, opt);
    m.linear = coupling_set(m.site, true);
    m.circular = coupling_set(m.site, false);
    return m;
}

}  // namespace nfa
