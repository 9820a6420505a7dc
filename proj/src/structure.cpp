#include "beltrami/structure.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace beltrami {

StructureFunction::StructureFunction(Eval eval, StructureKind kind, double k,
                                     double alpha, double holder_const)
    : eval_(std::move(eval)),
      kind_(kind),
      k_(k),
      alpha_(alpha),
      holder_const_(holder_const) {
    if (!(k >= 0.0 && k < 1.0))
        throw std::invalid_argument("ellipticity constant must satisfy 0 <= k < 1");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("Hoelder exponent must lie in (0, 1]");
    if (holder_const < 0.0)
        throw std::invalid_argument("Hoelder constant must be nonnegative");
}

StructureFunction linear_structure(cplx mu, cplx nu, double alpha) {
    const double k = std::abs(mu) + std::abs(nu);
    if (k >= 1.0)
        throw std::invalid_argument("|mu| + |nu| must be below 1");
    return StructureFunction(
        [mu, nu](cplx, cplx xi) { return mu * xi + nu * std::conj(xi); },
        StructureKind::linear, k, alpha, 0.0);
}

StructureFunction holder_linear(double amplitude, double alpha) {
    if (!(amplitude >= 0.0 && amplitude < 1.0))
        throw std::invalid_argument("amplitude must lie in [0, 1)");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("Hoelder exponent must lie in (0, 1]");
    return StructureFunction(
        [amplitude, alpha](cplx z, cplx xi) {
            const double t = std::pow(std::abs(z), alpha);
            return amplitude * (t / (1.0 + t)) * xi;
        },
        StructureKind::custom, amplitude, alpha, amplitude / 2.0);
}

cplx ExtremalPair::f0(cplx z) const {
    const double r = std::abs(z);
    if (r == 0.0) return cplx(0.0, 0.0);
    return z * z * std::pow(r, a - 1.0);
}

cplx ExtremalPair::f0_dz(cplx z) const {
    const double r = std::abs(z);
    if (r == 0.0) return cplx(0.0, 0.0);
    return 0.5 * (a + 3.0) * z * std::pow(r, a - 1.0);
}

cplx ExtremalPair::f0_dzbar(cplx z) const {
    const double r = std::abs(z);
    if (r == 0.0) return cplx(0.0, 0.0);
    return 0.5 * (a - 1.0) * z * z * z * std::pow(r, a - 3.0);
}

ExtremalPair power_example(double K) {
    if (!(K > 1.0))
        throw std::invalid_argument("distortion K must exceed 1");
    const double k = (K - 1.0) / (K + 1.0);
    const double a = 3.0 / (2.0 * K + 1.0);
    StructureFunction H(
        [k](cplx, cplx xi) {
            if (xi == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
            // xi^2 / conj(xi); library division handles tiny |xi| safely.
            return -(k / 3.0) * (xi * xi) / std::conj(xi);
        },
        StructureKind::autonomous, k, 0.5, 0.0);
    return ExtremalPair{std::move(H), K, k, a};
}

StructureFunction freeze(const StructureFunction& H, cplx z0) {
    return StructureFunction(
        [H, z0](cplx, cplx xi) { return H(z0, xi); }, StructureKind::frozen,
        H.k(), H.alpha(), 0.0);
}

ConditionReport verify_condition(const StructureFunction& H,
                                 const DiskDomain& domain, int samples,
                                 Rng& rng) {
    if (samples < 100)
        throw std::invalid_argument("need at least 100 samples");
    ConditionReport rep{0.0, 0.0, 0.0, false};
    const cplx c = domain.center();
    const double R = domain.radius();
    for (int i = 0; i < samples; ++i) {
        const cplx z1 = rng.in_disk(c, R);
        const cplx z2 = rng.in_disk(c, R);
        const cplx x1 = rng.in_disk(0.0, 10.0);
        const cplx x2 = rng.in_disk(0.0, 10.0);
        const double dx = std::abs(x1 - x2);
        if (dx > 1e-9) {
            const double q = std::abs(H(z1, x1) - H(z1, x2)) / dx;
            rep.max_lipschitz = std::max(rep.max_lipschitz, q);
        }
        const double dz = std::abs(z1 - z2);
        const double ax = std::abs(x1);
        if (dz > 1e-9 && ax > 1e-9) {
            const double q = std::abs(H(z1, x1) - H(z2, x1)) /
                             (std::pow(dz, H.alpha()) * 2.0 * ax);
            rep.max_holder = std::max(rep.max_holder, q);
        }
        rep.max_at_zero =
            std::max(rep.max_at_zero, std::abs(H(z1, cplx(0.0, 0.0))));
    }
    rep.violation = rep.max_lipschitz > H.k() + 1e-6 ||
                    rep.max_holder > H.holder_const() + 1e-6 ||
                    rep.max_at_zero > 1e-6;
    return rep;
}

LinearCoefficients linearize(const StructureFunction& H, cplx xi, cplx z) {
    const double delta = 1e-5 * std::max(1.0, std::abs(xi));
    auto wirt = [&](double d) {
        const cplx fx = (H(z, xi + d) - H(z, xi - d)) / (2.0 * d);
        const cplx fyv = (H(z, xi + cplx(0.0, d)) - H(z, xi - cplx(0.0, d))) /
                         (2.0 * d);
        const cplx ify(-fyv.imag(), fyv.real());
        return std::pair<cplx, cplx>{0.5 * (fx - ify), 0.5 * (fx + ify)};
    };
    const auto [a1, b1] = wirt(delta);
    const auto [a2, b2] = wirt(delta / 2.0);
    if (std::abs(a1 - a2) + std::abs(b1 - b2) > 1e-3)
        throw std::domain_error(
            "difference quotients disagree across step halving; H is not C^1 here");
    // Diagonal probe: the two Wirtinger coefficients must predict H along a
    // direction not used to compute them.
    const cplx e = delta * cplx(std::sqrt(0.5), std::sqrt(0.5));
    const cplx predicted = H(z, xi) + a2 * e + b2 * std::conj(e);
    if (std::abs(predicted - H(z, xi + e)) / delta > 1e-3)
        throw std::domain_error(
            "directional derivatives are not linear in the direction; H is not C^1 here");
    // Richardson extrapolation of the two central estimates.
    const cplx hxi = (4.0 * a2 - a1) / 3.0;
    const cplx hxibar = (4.0 * b2 - b1) / 3.0;
    const double den = 1.0 - std::norm(hxibar);
    if (den <= 0.0)
        throw std::domain_error("|H_xibar| >= 1; linearization is degenerate");
    LinearCoefficients out{hxi / den, std::conj(hxi) * hxibar / den};
    if (std::abs(out.mu) + std::abs(out.nu) > H.k() + 1e-4)
        throw std::logic_error(
            "linearized coefficients exceed the declared ellipticity");
    return out;
}

}  // namespace beltrami
