#include "beltrami/solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace beltrami {

SolverConfig SolverConfig::defaults(DomainPtr dom) {
    const double R = dom->radius();
    return SolverConfig{std::move(dom),
                        1e-8 * std::sqrt(std::numbers::pi) * R, 200};
}

SolverReport solve_riemann_hilbert(const StructureFunction& H, cplx z0,
                                   const ComplexField& f,
                                   const SolverConfig& cfg,
                                   const ComplexField* initial) {
    if (!cfg.domain)
        throw std::invalid_argument("solver config lacks a domain");
    if (!f.domain().same_geometry(*cfg.domain))
        throw std::invalid_argument("base field domain does not match the config");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be positive");
    if (H.k() >= 1.0)
        throw std::invalid_argument("ellipticity k must be below 1");
    if (std::abs(z0 - cfg.domain->center()) > cfg.domain->radius())
        throw std::invalid_argument("freezing point lies outside the domain");

    const DomainPtr dom = f.domain_ptr();
    TransformWorkspace ws(dom);
    const GradientField gf = wirtinger(f);
    auto indices = dom->masked_indices();

    ComplexField psi = initial ? *initial : ComplexField(dom);
    if (initial && !initial->domain().same_geometry(*dom))
        throw std::invalid_argument("initial iterate domain mismatch");
    ComplexField spsi =
        (initial && l2_norm(*initial) > 0.0) ? beurling(ws, psi) : ComplexField(dom);

    SolverReport rep{ComplexField(dom), ComplexField(dom), 0, {}, 0.0, 0.0,
                     0.0, 0.0, 0.0, H.k(), false};

    for (int it = 0; it < cfg.max_iters; ++it) {
        ComplexField next(dom);
        std::span<cplx> nv = next.raw_mutable();
        for (std::uint32_t idx : indices)
            nv[idx] = H(z0, spsi.at_flat(idx) + gf.dz.at_flat(idx)) -
                      gf.dzbar.at_flat(idx);
        const double inc = l2_distance(next, psi);
        rep.increments.push_back(inc);
        psi = std::move(next);
        rep.iterations = it + 1;
        if (inc < cfg.tol) {
            rep.converged = true;
            break;
        }
        spsi = beurling(ws, psi);
    }

    rep.fixed_point = psi;
    rep.solution = add(cauchy(ws, psi), f);

    for (std::size_t i = 0; i + 1 < rep.increments.size(); ++i)
        if (rep.increments[i] > 0.0)
            rep.measured_contraction =
                std::max(rep.measured_contraction,
                         rep.increments[i + 1] / rep.increments[i]);

    const GradientField gF = wirtinger(rep.solution);
    {
        ComplexField res(dom);
        std::span<cplx> rv = res.raw_mutable();
        for (std::uint32_t idx : indices)
            rv[idx] = gF.dzbar.at_flat(idx) - H(z0, gF.dz.at_flat(idx));
        rep.final_residual = l2_norm(res);
    }
    {
        double num = 0.0, den = 0.0;
        for (std::uint32_t idx : indices) {
            num += std::norm(gF.dz.at_flat(idx)) + std::norm(gF.dzbar.at_flat(idx));
            den += std::norm(gf.dz.at_flat(idx)) + std::norm(gf.dzbar.at_flat(idx));
        }
        rep.norm_ratio = den > 0.0 ? std::sqrt(num / den) :
                         (num > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    }
    rep.defect_dzbar_norm = l2_norm(psi);
    rep.defect_dz_norm = l2_norm(beurling(ws, psi));
    return rep;
}

SolverReport solve_frozen(const StructureFunction& H, cplx z0,
                          const SolverConfig& cfg) {
    if (!cfg.domain)
        throw std::invalid_argument("solver config lacks a domain");
    const ComplexField id =
        ComplexField::sample(cfg.domain, [](cplx z) { return z; });
    return solve_riemann_hilbert(H, z0, id, cfg);
}

std::vector<double> contraction_trace(const SolverReport& report) {
    std::vector<double> ratios;
    for (std::size_t i = 0; i + 1 < report.increments.size(); ++i)
        if (report.increments[i] > 0.0)
            ratios.push_back(report.increments[i + 1] / report.increments[i]);
    for (double r : ratios)
        if (r > report.ellipticity + 0.05)
            throw std::logic_error(
                "increment ratio exceeds the contraction bound");
    return ratios;
}

}  // namespace beltrami
