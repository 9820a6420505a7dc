#include "beltrami/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "beltrami/fit.hpp"

namespace beltrami {

namespace {

constexpr double kZeroGrad = 1e-12;

double node_distortion(cplx dz, cplx dzbar) {
    const double a = std::abs(dz), b = std::abs(dzbar);
    if (a < kZeroGrad && b < kZeroGrad) return 1.0;
    if (a <= b) return std::numeric_limits<double>::infinity();
    return (a + b) / (a - b);
}

template <typename Fn>
void for_interior_annulus(const ComplexField& f, double r_min, double r_max,
                          Fn&& fn) {
    const DiskDomain& d = f.domain();
    const double margin = 4.0 * d.spacing();
    for (std::uint32_t idx : d.masked_indices()) {
        const cplx z = d.node_flat(idx);
        if (d.boundary_distance(z) <= margin) continue;
        const double rc = std::abs(z - d.center());
        if (rc < r_min || rc >= r_max) continue;
        fn(idx, z);
    }
}

}  // namespace

JacobianReport jacobian(const ComplexField& f, double r_min, double r_max) {
    const GradientField g = wirtinger(f);
    JacobianReport rep{std::numeric_limits<double>::infinity(), cplx(0.0, 0.0),
                       0.0, 0.0, std::numeric_limits<double>::infinity()};
    std::size_t count = 0, nonpos = 0;
    double sum = 0.0;
    for_interior_annulus(f, r_min, r_max, [&](std::uint32_t idx, cplx z) {
        const double a2 = std::norm(g.dz.at_flat(idx));
        const double J = a2 - std::norm(g.dzbar.at_flat(idx));
        if (J < rep.min_J) {
            rep.min_J = J;
            rep.argmin = z;
        }
        const double ratio =
            a2 > 0.0 ? J / a2
                     : (J == 0.0
                            ? 1.0
                            : -std::numeric_limits<double>::infinity());
        rep.min_J_ratio = std::min(rep.min_J_ratio, ratio);
        if (J <= 0.0) ++nonpos;
        sum += J;
        ++count;
    });
    if (count == 0)
        throw std::invalid_argument("no interior nodes in the requested annulus");
    rep.mean_J = sum / static_cast<double>(count);
    rep.negative_fraction =
        static_cast<double>(nonpos) / static_cast<double>(count);
    return rep;
}

double quasiregularity_constant(const ComplexField& f, double r_min,
                                double r_max) {
    const GradientField g = wirtinger(f);
    double worst = 1.0;
    std::size_t count = 0;
    for_interior_annulus(f, r_min, r_max, [&](std::uint32_t idx, cplx) {
        worst = std::max(worst, node_distortion(g.dz.at_flat(idx),
                                                g.dzbar.at_flat(idx)));
        ++count;
    });
    if (count == 0)
        throw std::invalid_argument("no interior nodes in the requested annulus");
    return worst;
}

double difference_quotient_qr(const ComplexField& f, double h, cplx e) {
    const DiskDomain& d = f.domain();
    const double hg = d.spacing();
    if (h < 2.0 * hg * (1.0 - 1e-12))
        throw std::invalid_argument("difference step below twice the spacing");
    if (std::abs(std::abs(e) - 1.0) > 1e-9)
        throw std::invalid_argument("direction must be a unit complex number");
    const cplx shift = h * e;
    const int n = d.n();

    ComplexField fh(f.domain_ptr());
    std::span<cplx> fv = fh.raw_mutable();
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(n) * n, 0);
    std::size_t kept = 0;
    for (std::uint32_t idx : d.masked_indices()) {
        const cplx z = d.node_flat(idx);
        const auto shifted = interpolate(f, z + shift);
        if (!shifted) continue;
        fv[idx] = (*shifted - f.at_flat(idx)) / h;
        valid[idx] = 1;
        ++kept;
    }
    if (kept == 0)
        throw std::invalid_argument("shifted domain is empty at this step");

    const GradientField g = wirtinger_masked(fh, valid);
    const double margin = 4.0 * hg + h;
    cplx mean(0.0, 0.0);
    std::size_t count = 0;
    for (std::uint32_t idx : d.masked_indices()) {
        if (!valid[idx]) continue;
        if (d.boundary_distance(d.node_flat(idx)) <= margin) continue;
        mean += fh.at_flat(idx);
        ++count;
    }
    if (count == 0)
        throw std::invalid_argument("no interior nodes left after the shift");
    mean /= static_cast<double>(count);
    double dev = 0.0;
    for (std::uint32_t idx : d.masked_indices()) {
        if (!valid[idx]) continue;
        if (d.boundary_distance(d.node_flat(idx)) <= margin) continue;
        dev = std::max(dev, std::abs(fh.at_flat(idx) - mean));
    }
    // A quotient field varying less than the quadrature floor of the solves
    // that produce such fields is constant to working precision, and
    // constants are trivially quasiregular (affine maps land here).
    if (dev <= 1e-2 * std::max(std::abs(mean), 1e-300)) return 1.0;
    double worst = 1.0;
    for (std::uint32_t idx : d.masked_indices()) {
        if (!valid[idx]) continue;
        if (d.boundary_distance(d.node_flat(idx)) <= margin) continue;
        worst = std::max(worst, node_distortion(g.dz.at_flat(idx),
                                                g.dzbar.at_flat(idx)));
    }
    return worst;
}

double caccioppoli_ratio(const ComplexField& f, double rho, double R) {
    const DiskDomain& d = f.domain();
    if (!(rho > 0.0 && rho < R))
        throw std::invalid_argument("need 0 < rho < R");
    if (R > d.radius() + 1e-12)
        throw std::invalid_argument("outer radius exceeds the domain");
    const GradientField g = wirtinger(f);
    const double w = d.spacing() * d.spacing();
    const double rho2 = rho * rho, R2 = R * R;
    const cplx c = mean(f, R);
    double num = 0.0, den = 0.0;
    for (std::uint32_t idx : d.masked_indices()) {
        const double r2 = std::norm(d.node_flat(idx) - d.center());
        if (r2 < rho2)
            num += std::norm(g.dz.at_flat(idx)) + std::norm(g.dzbar.at_flat(idx));
        if (r2 < R2) den += std::norm(f.at_flat(idx) - c);
    }
    num *= w;
    den *= w;
    if (den < 1e-28) return 0.0;
    return num * (R - rho) * (R - rho) / den;
}

double decay_exponent(const ComplexField& g, cplx z0,
                      std::span<const double> radii) {
    if (radii.size() < 4)
        throw std::invalid_argument("need at least four radii");
    std::vector<double> lx, ly;
    for (double rho : radii) {
        const double v = l2_norm(g, z0, rho);
        if (v <= 0.0)
            throw std::invalid_argument("zero norm in decay fit");
        lx.push_back(std::log(rho));
        ly.push_back(std::log(v));
    }
    return fit_line(lx, ly).slope;
}

namespace {

HolderEstimate campanato_fit(std::vector<double> radii,
                             std::vector<double> values) {
    bool any_above_floor = false;
    for (double v : values) any_above_floor = any_above_floor || v >= 1e-14;
    if (!any_above_floor)
        throw std::invalid_argument(
            "all Campanato values sit at the rounding floor");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (values[i] < 1e-300) continue;
        lx.push_back(std::log(radii[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 3)
        throw std::invalid_argument("too few usable radii in Campanato fit");
    const LineFit fit = fit_line(lx, ly);
    HolderEstimate est{fit.slope - 1.0, std::exp(fit.intercept),
                       std::move(radii), std::move(values), fit.r_squared,
                       false};
    est.smoother_than_holder = est.gamma >= 0.98;
    return est;
}

std::vector<double> checked_radii(const ComplexField& g, cplx z0,
                                  std::span<const double> radii) {
    if (radii.size() < 5)
        throw std::invalid_argument("need at least five radii");
    std::vector<double> r(radii.begin(), radii.end());
    std::sort(r.begin(), r.end(), std::greater<double>());
    if (r.front() <= 0.0 || r.back() <= 0.0)
        throw std::invalid_argument("radii must be positive");
    for (std::size_t i = 0; i + 1 < r.size(); ++i)
        if (r[i + 1] >= r[i] * (1.0 - 1e-12))
            throw std::invalid_argument("radii must be strictly decreasing");
    const DiskDomain& d = g.domain();
    if (std::abs(z0 - d.center()) + r.front() > d.radius() + 1e-9)
        throw std::invalid_argument("largest disk is not contained in the domain");
    return r;
}

}  // namespace

HolderEstimate holder_exponent(const ComplexField& g, cplx z0,
                               std::span<const double> radii) {
    const std::vector<double> r = checked_radii(g, z0, radii);
    std::vector<double> values;
    values.reserve(r.size());
    for (double rho : r) {
        const cplx m = mean(g, z0, rho);
        double s = 0.0;
        const double rho2 = rho * rho;
        const double w = g.domain().spacing() * g.domain().spacing();
        for (std::uint32_t idx : g.domain().masked_indices()) {
            if (std::norm(g.domain().node_flat(idx) - z0) < rho2)
                s += std::norm(g.at_flat(idx) - m);
        }
        values.push_back(std::sqrt(s * w));
    }
    return campanato_fit(r, std::move(values));
}

HolderEstimate holder_exponent(const GradientField& g, cplx z0,
                               std::span<const double> radii) {
    const std::vector<double> r = checked_radii(g.dz, z0, radii);
    if (!g.dz.domain().same_geometry(g.dzbar.domain()))
        throw std::invalid_argument("gradient components live on different domains");
    std::vector<double> values;
    values.reserve(r.size());
    const double w = g.dz.domain().spacing() * g.dz.domain().spacing();
    for (double rho : r) {
        const cplx m1 = mean(g.dz, z0, rho);
        const cplx m2 = mean(g.dzbar, z0, rho);
        double s = 0.0;
        const double rho2 = rho * rho;
        for (std::uint32_t idx : g.dz.domain().masked_indices()) {
            if (std::norm(g.dz.domain().node_flat(idx) - z0) < rho2)
                s += std::norm(g.dz.at_flat(idx) - m1) +
                     std::norm(g.dzbar.at_flat(idx) - m2);
        }
        values.push_back(std::sqrt(s * w));
    }
    return campanato_fit(r, std::move(values));
}

std::vector<double> default_fit_radii(double domain_radius, int n) {
    const double h = 2.0 * domain_radius / n;
    const double r_max = 0.4 * domain_radius;
    const double r_min = std::max(r_max * std::pow(0.5, 5), 5.0 * h);
    if (r_min >= r_max)
        throw std::invalid_argument("grid too coarse for a Campanato fit");
    const double ratio = std::pow(r_min / r_max, 1.0 / 5.0);
    std::vector<double> radii(6);
    for (int j = 0; j < 6; ++j) radii[j] = r_max * std::pow(ratio, j);
    return radii;
}

std::vector<FloorStudyRow> jacobian_floor_study(const StructureFunction& H,
                                                std::span<const double> R0s,
                                                int n, double tol,
                                                int max_iters) {
    std::vector<FloorStudyRow> rows;
    for (double R0 : R0s) {
        if (!(R0 > 0.0)) throw std::invalid_argument("R0 must be positive");
        SolverConfig cfg = SolverConfig::defaults(make_disk(0.0, 2.0 * R0, n));
        if (tol > 0.0) cfg.tol = tol;
        cfg.max_iters = max_iters;
        const SolverReport rep = solve_frozen(H, cplx(0.0, 0.0), cfg);
        rows.push_back({R0, jacobian(rep.solution, 0.0, R0)});
    }
    return rows;
}

std::vector<double> jacobian_growth_profile(const ComplexField& g, cplx z0,
                                            std::span<const double> radii,
                                            double K) {
    if (!(K >= 1.0)) throw std::invalid_argument("K must be at least 1");
    std::vector<double> r(radii.begin(), radii.end());
    std::sort(r.begin(), r.end());
    const GradientField grad = wirtinger(g);
    const DiskDomain& d = g.domain();
    const double w = d.spacing() * d.spacing();
    std::vector<double> out;
    out.reserve(r.size());
    for (double rho : r) {
        if (std::abs(z0 - d.center()) + rho > d.radius() + 1e-9)
            throw std::invalid_argument("disk is not contained in the domain");
        double s = 0.0;
        const double rho2 = rho * rho;
        for (std::uint32_t idx : d.masked_indices()) {
            if (std::norm(d.node_flat(idx) - z0) < rho2)
                s += std::norm(grad.dz.at_flat(idx)) -
                     std::norm(grad.dzbar.at_flat(idx));
        }
        out.push_back(std::pow(rho, -2.0 / K) * s * w);
    }
    return out;
}

}  // namespace beltrami
