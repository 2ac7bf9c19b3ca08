#include "nfarray/fiber.hpp"

#include <iostream>
#include <vector>

#include "nfarray/constants.hpp"

namespace nfa {

using num::bessel_j;
using num::bessel_j_prime;
using num::bessel_k;
using num::bessel_k_prime;

void FiberSpec::validate() const {
    if (!(radius > 0)) throw std::invalid_argument("fiber radius must be positive");
    if (!(n2 >= 1.0)) throw std::invalid_argument("cladding index n2 must be >= 1");
    if (!(n1 > n2)) throw ModeCutoffError("mode cutoff: core index n1 must exceed n2");
}

double sellmeier_silica(double wavelength) {
    const double l2 = std::pow(wavelength * 1e6, 2);
    const double n2 = 1.0 + 0.6961663 * l2 / (l2 - 0.0684043 * 0.0684043) +
                      0.4079426 * l2 / (l2 - 0.1162414 * 0.1162414) +
                      0.8974794 * l2 / (l2 - 9.896161 * 9.896161);
    return std::sqrt(n2);
}

const char* to_string(Pol p) {
    switch (p) {
        case Pol::CircPlus: return "circ+";
        case Pol::CircMinus: return "circ-";
        case Pol::X: return "x";
        case Pol::Y: return "y";
    }
    return "?";
}

double ModeSolution::k() const { return omega / phys::c; }

namespace {

struct EigenSides {
    double lhs, rhs;
};

EigenSides eigen_sides(const FiberSpec& fb, double omega, double beta) {
    const double k = omega / phys::c;
    const double n1s = fb.n1 * fb.n1, n2s = fb.n2 * fb.n2;
    const double h = std::sqrt(n1s * k * k - beta * beta);
    const double q = std::sqrt(beta * beta - n2s * k * k);
    const double ha = h * fb.radius, qa = q * fb.radius;
    const double kp = bessel_k_prime(1, qa) / (qa * bessel_k(1, qa));
    const double lhs = bessel_j(0, ha) / (ha * bessel_j(1, ha));
    const double t1 = (n1s - n2s) / (2 * n1s) * kp;
    const double t2 = beta * beta / (n1s * k * k) * std::pow(1 / (qa * qa) + 1 / (ha * ha), 2);
    const double rhs = -(n1s + n2s) / (2 * n1s) * kp + 1 / (ha * ha) - std::sqrt(t1 * t1 + t2);
    return {lhs, rhs};
}

}  // namespace

double eigen_residual(const FiberSpec& fiber, double omega, double beta) {
    const auto [l, r] = eigen_sides(fiber, omega, beta);
    return std::abs(l - r) / std::max(std::abs(l), std::abs(r));
}

double solve_beta(const FiberSpec& fiber, double omega, double root_rel_tol) {
    fiber.validate();
    const double k = omega / phys::c;
    const double lo = fiber.n2 * k * (1 + 1e-9), hi = fiber.n1 * k * (1 - 1e-9);
    auto f = [&](double b) {
        const auto [l, r] = eigen_sides(fiber, omega, b);
        return l - r;
    };
    constexpr int kScan = 2000;
    std::vector<double> grid(kScan), vals(kScan);
    for (int i = 0; i < kScan; ++i) {
        grid[i] = lo + (hi - lo) * i / (kScan - 1);
        vals[i] = f(grid[i]);
    }
    double best = -1;
    for (int i = 0; i + 1 < kScan; ++i) {
        if (!std::isfinite(vals[i]) || !std::isfinite(vals[i + 1])) continue;
        if ((vals[i] > 0) == (vals[i + 1] > 0)) continue;
        const double root = num::find_root(f, grid[i], grid[i + 1], root_rel_tol);
        // Sign changes across poles of J0/J1 are rejected by the residual.
        if (eigen_residual(fiber, omega, root) < 1e-8) best = std::max(best, root);
    }
    if (best < 0) throw ModeCutoffError("mode cutoff: no guided HE11 root in (n2 k, n1 k)");
    return best;
}

ModeSolution solve_mode(const FiberSpec& fiber, double omega, double root_rel_tol) {
    ModeSolution m;
    m.omega = omega;
    const double k = omega / phys::c;
    const double V = k * fiber.radius * std::sqrt(fiber.n1 * fiber.n1 - fiber.n2 * fiber.n2);
    m.single_mode = V < 2.405;
    if (!m.single_mode)
        std::cerr << "warning: V = " << V << " exceeds the single-mode cutoff 2.405\n";

    m.beta = solve_beta(fiber, omega, root_rel_tol);
    m.residual = eigen_residual(fiber, omega, m.beta);
    m.h = std::sqrt(fiber.n1 * fiber.n1 * k * k - m.beta * m.beta);
    m.q = std::sqrt(m.beta * m.beta - fiber.n2 * fiber.n2 * k * k);
    const double ha = m.h * fiber.radius, qa = m.q * fiber.radius;
    m.s_param = (1 / (ha * ha) + 1 / (qa * qa)) /
                (bessel_j_prime(1, ha) / (ha * bessel_j(1, ha)) +
                 bessel_k_prime(1, qa) / (qa * bessel_k(1, qa)));

    m.norm_C = 1.0;
    const double integral = normalization_integral(m, fiber, 1e-12);
    m.norm_C = 1.0 / std::sqrt(integral);

    const double dw = omega * 1e-6;
    const double bp = solve_beta(fiber, omega + dw, root_rel_tol);
    const double bm = solve_beta(fiber, omega - dw, root_rel_tol);
    m.v_group = 2 * dw / (bp - bm);
    m.v_phase = omega / m.beta;
    return m;
}

CylVec profile_interior(const ModeSolution& m, const FiberSpec& fb, double r) {
    const double ha = m.h * fb.radius, qa = m.q * fb.radius, hr = m.h * r;
    const double s = m.s_param;
    const double amp = m.norm_C * bessel_k(1, qa) / bessel_j(1, ha);
    const double j0 = bessel_j(0, hr), j1 = bessel_j(1, hr), j2 = bessel_j(2, hr);
    CylVec e;
    e.r = cplx(0, amp * m.q / m.h * ((1 - s) * j0 - (1 + s) * j2));
    e.phi = -amp * m.q / m.h * ((1 - s) * j0 + (1 + s) * j2);
    e.z = amp * 2 * m.q / m.beta * j1;
    return e;
}

CylVec profile_exterior(const ModeSolution& m, const FiberSpec&, double r) {
    const double qr = m.q * r, s = m.s_param, C = m.norm_C;
    const double k0 = bessel_k(0, qr), k1 = bessel_k(1, qr), k2 = bessel_k(2, qr);
    CylVec e;
    e.r = cplx(0, C * ((1 - s) * k0 + (1 + s) * k2));
    e.phi = -C * ((1 - s) * k0 - (1 + s) * k2);
    e.z = C * 2 * m.q / m.beta * k1;
    return e;
}

CylVec profile_reference(const ModeSolution& m, const FiberSpec& fb, double r) {
    if (r < 0) throw std::invalid_argument("profile: r must be non-negative");
    return r < fb.radius ? profile_interior(m, fb, r) : profile_exterior(m, fb, r);
}

CylVec profile_polarized(const ModeSolution& m, const FiberSpec& fb, double r, double phi, int f,
                         Pol p) {
    if (f != 1 && f != -1) throw std::invalid_argument("direction f must be +1 or -1");
    const CylVec e = profile_reference(m, fb, r);
    const double sq2 = std::sqrt(2.0), c = std::cos(phi), s = std::sin(phi);
    const cplx I(0, 1);
    switch (p) {
        case Pol::CircPlus: return {e.r, e.phi, double(f) * e.z};
        case Pol::CircMinus: return {e.r, -e.phi, double(f) * e.z};
        case Pol::X: return {sq2 * e.r * c, sq2 * I * e.phi * s, sq2 * double(f) * e.z * c};
        case Pol::Y: return {sq2 * e.r * s, -sq2 * I * e.phi * c, sq2 * double(f) * e.z * s};
    }
    throw std::invalid_argument("unknown polarization");
}

SphericalMagnitudes spherical_magnitudes(const CylVec& e) {
    const double er = std::abs(e.r), ep = std::abs(e.phi);
    return {std::abs(e.z), (er - ep) / std::sqrt(2.0), (er + ep) / std::sqrt(2.0)};
}

std::array<cplx, 3> spherical_components(const CylVec& v, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    const cplx vx = v.r * c - v.phi * s;
    const cplx vy = v.r * s + v.phi * c;
    const cplx I(0, 1);
    const double inv = 1.0 / std::sqrt(2.0);
    return {(vx - I * vy) * inv, v.z, -(vx + I * vy) * inv};
}

double normalization_integral(const ModeSolution& m, const FiberSpec& fb, double rel_tol) {
    const double a = fb.radius;
    auto dens_in = [&](double r) {
        return fb.n1 * fb.n1 * profile_interior(m, fb, r).norm2() * r;
    };
    auto dens_out = [&](double r) {
        return fb.n2 * fb.n2 * profile_exterior(m, fb, r).norm2() * r;
    };
    // Exterior cut where K1(q r)^2 q r has fallen 18 decades below its value at a.
    const double qa = m.q * a;
    const double ref = std::pow(bessel_k(1, qa), 2) * qa;
    double qr = qa + 1.0;
    while (std::pow(bessel_k(1, qr), 2) * qr > 1e-18 * ref) qr += 1.0;
    const double r_max = qr / m.q;
    const double inner = num::integrate(dens_in, 0.0, a, rel_tol);
    // Exterior split into decay-length panels so the adaptive rule sees a smooth integrand.
    double outer = 0;
    const double step = 2.0 / m.q;
    for (double lo = a; lo < r_max; lo += step)
        outer += num::integrate(dens_out, lo, std::min(lo + step, r_max), rel_tol);
    return 2 * phys::pi * (inner + outer);
}

}  // namespace nfa
