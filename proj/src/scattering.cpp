#include "nfarray/scattering.hpp"

namespace nfa {

namespace {

constexpr cplx I(0.0, 1.0);

cplx lorentz_denominator(const AtomModel& atom, double delta) {
    const double g = atom.rates.gamma_total;
    if (!(g > 0)) throw InvalidRatesError("total decay rate must be positive");
    return cplx(g, -2 * delta);
}

}  // namespace

const char* to_string(Channel c) { return c == Channel::X ? "x" : "y"; }

ScatteringMatrix scattering_matrix(const AtomModel& atom, double delta, Basis basis) {
    const cplx den = lorentz_denominator(atom, delta);
    const CouplingSet& set = basis == Basis::Linear ? atom.linear : atom.circular;
    const double pg = 1.0 / atom.site.transition.ground_count();
    ScatteringMatrix out;
    out.basis = basis;
    out.delta = delta;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const cplx sum = (set[a].values.conjugate().cwiseProduct(set[b].values)).sum();
            out.S(a, b) = 2.0 * mode_direction(a) / den * pg * sum;
        }
    return out;
}

ScatteringMatrix scattering_closed_form(const AtomModel& atom, double delta) {
    const cplx den = lorentz_denominator(atom, delta);
    const double u0 = atom.rates.u0;
    const auto& s = atom.site;
    ScatteringMatrix out;
    out.delta = delta;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const int f = mode_direction(a), fp = mode_direction(b);
            if (a % 2 != b % 2) continue;
            const double shape = a % 2 == 0 ? s.er * s.er + f * fp * s.ez * s.ez : s.ephi * s.ephi;
            out.S(a, b) = double(f) * u0 / den * shape;
        }
    return out;
}

double optical_depth(const ScatteringMatrix& s, int k) {
    return 2 * (double(mode_direction(k)) * s.S(k, k)).real();
}

double optical_depth_from_rates(const CouplingTable& table, double gamma_total, double delta) {
    const double pg = 1.0 / table.values.cols();
    return 4 * gamma_total / (gamma_total * gamma_total + 4 * delta * delta) * pg *
           table.values.cwiseAbs2().sum();
}

ChannelScalars channel_scalars(const AtomModel& atom, double delta) {
    const cplx den = lorentz_denominator(atom, delta);
    const double u0 = atom.rates.u0;
    const auto& s = atom.site;
    return {u0 * s.er * s.er / den, u0 * s.ephi * s.ephi / den, u0 * s.ez * s.ez / den};
}

PolarizationChannel single_atom_transfer(Channel xi, const ChannelScalars& s) {
    PolarizationChannel c;
    c.xi = xi;
    c.s = s;
    if (xi == Channel::X) {
        const cplx den = 1.0 - s.S_r - s.S_z;
        if (std::abs(den) < 1e-300) throw SingularTransferError("singular single-atom transfer");
        c.M(0, 0) = (1.0 - 2.0 * s.S_r) * (1.0 - 2.0 * s.S_z) / den;
        c.M(1, 1) = 1.0 / den;
        c.M(1, 0) = (s.S_r - s.S_z) / den;
        c.M(0, 1) = -c.M(1, 0);
        c.R = -s.S_r + s.S_z;
        c.T = 1.0 - s.S_r - s.S_z;
    } else {
        const cplx den = 1.0 - s.S_phi;
        if (std::abs(den) < 1e-300) throw SingularTransferError("singular single-atom transfer");
        c.M(0, 0) = (1.0 - 2.0 * s.S_phi) / den;
        c.M(1, 1) = 1.0 / den;
        c.M(1, 0) = s.S_phi / den;
        c.M(0, 1) = -c.M(1, 0);
        c.R = -s.S_phi;
        c.T = 1.0 - s.S_phi;
    }
    return c;
}

Eigen::Matrix2cd transfer_from_S(cplx Spp, cplx Spm, cplx Smp, cplx Smm) {
    const cplx den = 1.0 + Smm;
    if (std::abs(den) < 1e-300) throw SingularTransferError("1 + S_-- vanishes");
    Eigen::Matrix2cd M;
    M(0, 0) = 1.0 - Spp + Spm * Smp / den;
    M(1, 1) = 1.0 / den;
    M(0, 1) = -Spm / den;
    M(1, 0) = -Smp / den;
    return M;
}

Eigen::Matrix2cd channel_transfer(const ScatteringMatrix& s, Channel xi) {
    const int p = xi == Channel::X ? 0 : 1, m = p + 2;
    return transfer_from_S(s.S(p, p), s.S(p, m), s.S(m, p), s.S(m, m));
}

Eigen::Matrix4cd general_transfer_4x4(const ScatteringMatrix& s) {
    Eigen::Matrix4cd Sp = Eigen::Matrix4cd::Zero(), Sm = Eigen::Matrix4cd::Zero();
    Sp.leftCols(2) = s.S.leftCols(2);
    Sm.rightCols(2) = s.S.rightCols(2);
    const Eigen::Matrix4cd A = Eigen::Matrix4cd::Identity() + Sm;
    Eigen::FullPivLU<Eigen::Matrix4cd> lu(A);
    if (!lu.isInvertible()) throw SingularTransferError("1 + S^(-) is singular");
    return lu.solve(Eigen::Matrix4cd::Identity() - Sp);
}

}  // namespace nfa
