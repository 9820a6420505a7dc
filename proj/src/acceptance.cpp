#include "beltrami/acceptance.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "beltrami/analysis.hpp"
#include "beltrami/inverse.hpp"
#include "beltrami/sampling.hpp"
#include "beltrami/solver.hpp"
#include "beltrami/transforms.hpp"

namespace beltrami {
namespace {

namespace fs = std::filesystem;

Rng criterion_rng(std::uint64_t seed, int id) {
    return Rng(seed * 1000003ULL + static_cast<std::uint64_t>(id));
}

struct AnchorErrors {
    double c_const;
    double s_const;
    IdentityReport idr;
};

// Max interior error of C(1) and S(1) against their closed forms, plus the
// identity residuals, on one grid.
AnchorErrors transform_anchors(DomainPtr dom) {
    const TransformWorkspace ws(dom);
    const ComplexField one =
        ComplexField::sample(dom, [](cplx) { return cplx(1.0, 0.0); });
    const ComplexField C1 = cauchy(ws, one);
    const ComplexField S1 = beurling(ws, one);
    const double h = dom->spacing();
    const cplx c = dom->center();
    AnchorErrors e{0.0, 0.0, verify_cauchy_identities(ws, one)};
    for (int iy = 0; iy < dom->n(); ++iy)
        for (int ix = 0; ix < dom->n(); ++ix) {
            if (!dom->interior(ix, iy, 2.0 * h)) continue;
            const cplx w = dom->node(ix, iy) - c;
            e.c_const = std::max(
                e.c_const, std::abs(C1.at(ix, iy) - (std::conj(w) - w)));
            e.s_const =
                std::max(e.s_const, std::abs(S1.at(ix, iy) + cplx(1.0, 0.0)));
        }
    return e;
}

CriterionResult criterion_1(std::uint64_t seed) {
    CriterionResult cr{1, "transform identities and isometry", {}, };
    DomainPtr d128 = make_disk(cplx(0.0, 0.0), 1.0, 128);
    DomainPtr d256 = make_disk(cplx(0.0, 0.0), 1.0, 256);

    Rng rng = criterion_rng(seed, 1);
    const TransformWorkspace ws128(d128);
    double iso_dev = 0.0;
    for (int i = 0; i < 20; ++i) {
        const ComplexField psi = random_bandlimited(d128, rng);
        const double ratio = l2_norm(beurling(ws128, psi)) / l2_norm(psi);
        iso_dev = std::max(iso_dev, std::abs(ratio - 1.0));
    }
    cr.assertions.push_back(assert_le("c1.isometry_dev", iso_dev, 0.05));

    const AnchorErrors a128 = transform_anchors(d128);
    const AnchorErrors a256 = transform_anchors(d256);
    const double h128 = d128->spacing();
    cr.assertions.push_back(
        assert_le("c1.cauchy_const", a128.c_const, 5.0 * h128));
    cr.assertions.push_back(
        assert_le("c1.beurling_const", a128.s_const, 10.0 * h128));

    cr.assertions.push_back(assert_ge("c1.shrink_cauchy_const",
                                      a128.c_const / a256.c_const, 1.4));
    cr.assertions.push_back(assert_ge("c1.shrink_beurling_const",
                                      a128.s_const / a256.s_const, 1.4));
    cr.assertions.push_back(
        assert_ge("c1.shrink_dbar_identity",
                  a128.idr.dbar_residual / a256.idr.dbar_residual, 1.4));
    cr.assertions.push_back(
        assert_ge("c1.shrink_boundary",
                  a128.idr.boundary_residual / a256.idr.boundary_residual,
                  1.4));
    cr.assertions.push_back(
        assert_ge("c1.shrink_s_identity",
                  a128.idr.s_residual / a256.idr.s_residual, 1.4));
    return cr;
}

CriterionResult criterion_2(std::uint64_t seed) {
    (void)seed;
    CriterionResult cr{2, "contraction and convergence, linear case", {}};
    DomainPtr dom = make_disk(cplx(0.0, 0.0), 1.0, 128);
    const StructureFunction H = linear_structure(cplx(0.5, 0.0), cplx(0.0, 0.0));
    const SolverReport r =
        solve_frozen(H, cplx(0.0, 0.0), SolverConfig::defaults(dom));

    const ComplexField psi_exact = ComplexField::sample(
        dom, [](cplx) { return cplx(1.0 / 3.0, 0.0); });
    const ComplexField f_exact = ComplexField::sample(dom, [](cplx z) {
        return (2.0 / 3.0) * z + (1.0 / 3.0) * std::conj(z);
    });

    cr.assertions.push_back(
        assert_ge("c2.converged", r.converged ? 1.0 : 0.0, 1.0));
    cr.assertions.push_back(assert_le(
        "c2.psi_error", l2_distance(r.fixed_point, psi_exact), 0.05));
    cr.assertions.push_back(
        assert_le("c2.f_error", l2_distance(r.solution, f_exact), 0.05));
    cr.assertions.push_back(
        assert_le("c2.contraction", r.measured_contraction, 0.55));
    cr.assertions.push_back(assert_le("c2.norm_ratio", r.norm_ratio, 6.1));
    return cr;
}

struct NamedStructure {
    const char* name;
    StructureFunction H;
};

std::vector<NamedStructure> builtin_structures() {
    std::vector<NamedStructure> v;
    v.push_back({"zero", linear_structure(cplx(0.0, 0.0), cplx(0.0, 0.0))});
    v.push_back({"linear_half", linear_structure(cplx(0.5, 0.0), cplx(0.0, 0.0))});
    v.push_back({"linear_imag", linear_structure(cplx(0.0, 0.3), cplx(0.0, 0.0))});
    v.push_back(
        {"linear_mixed", linear_structure(cplx(0.25, 0.0), cplx(0.0, 0.25))});
    v.push_back({"power_2", power_example(2.0).H});
    v.push_back({"power_3", power_example(3.0).H});
    v.push_back(
        {"holder_frozen", freeze(holder_linear(0.4, 0.5), cplx(0.7, 0.0))});
    return v;
}

CriterionResult criterion_3(std::uint64_t seed) {
    (void)seed;
    CriterionResult cr{3, "defect-norm equality on builtin solves", {}};
    DomainPtr dom = make_disk(cplx(0.0, 0.0), 1.0, 96);
    for (const NamedStructure& s : builtin_structures()) {
        const SolverReport r =
            solve_frozen(s.H, cplx(0.0, 0.0), SolverConfig::defaults(dom));
        cr.assertions.push_back(assert_ge(
            std::string("c3.converged_") + s.name, r.converged ? 1.0 : 0.0,
            1.0));
        const double dmax = std::max(r.defect_dzbar_norm, r.defect_dz_norm);
        const double dev =
            dmax < 1e-13
                ? 0.0
                : std::abs(r.defect_dz_norm - r.defect_dzbar_norm) / dmax;
        cr.assertions.push_back(
            assert_le(std::string("c3.defect_equality_") + s.name, dev, 0.05));
    }
    return cr;
}

CriterionResult criterion_4(std::uint64_t seed) {
    (void)seed;
    CriterionResult cr{4, "distortion-2 power map reproduces its equation", {}};
    const ExtremalPair ep = power_example(2.0);
    DomainPtr dom = make_disk(cplx(0.0, 0.0), 1.0, 256);
    const double h = dom->spacing();

    const ComplexField F0 =
        ComplexField::sample(dom, [&](cplx z) { return ep.f0(z); });
    const GradientField g = wirtinger(F0);

    double resid = 0.0;
    for (int iy = 0; iy < dom->n(); ++iy)
        for (int ix = 0; ix < dom->n(); ++ix) {
            if (!dom->interior(ix, iy, 4.0 * h)) continue;
            const double r = std::abs(dom->node(ix, iy));
            if (r <= 0.1 || r >= 0.9) continue;
            const cplx want = ep.H(cplx(0.0, 0.0), g.dz.at(ix, iy));
            resid = std::max(resid, std::abs(g.dzbar.at(ix, iy) - want));
        }
    cr.assertions.push_back(
        assert_le("c4.residual", resid, 20.0 * std::pow(h, 0.6)));

    // The sharp distortion sits on the directional derivatives: the power
    // map itself stays at (1+1/9)/(1-1/9) = 1.25, while d_e f0 swings up
    // to the full equation distortion along e^{2i theta} = -1.
    double dist = 1.0;
    for (const cplx e : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
        const ComplexField de = directional(g, e);
        dist = std::max(dist, quasiregularity_constant(de, 0.1, 0.9));
    }
    cr.assertions.push_back(assert_ge("c4.distortion_low", dist, 1.9));
    cr.assertions.push_back(assert_le("c4.distortion_high", dist, 2.05));

    const std::vector<double> radii = default_fit_radii(1.0, 256);
    const HolderEstimate est =
        holder_exponent(g.dz, cplx(0.0, 0.0), radii);
    cr.assertions.push_back(
        assert_le("c4.campanato_dev", std::abs(est.gamma - 0.6), 0.05));
    return cr;
}

CriterionResult criterion_5(std::uint64_t seed) {
    (void)seed;
    CriterionResult cr{5, "Hoelder estimator calibration", {}};
    DomainPtr dom = make_disk(cplx(0.0, 0.0), 1.0, 256);
    const std::vector<double> radii = default_fit_radii(1.0, 256);
    for (const double gamma : {0.3, 0.5, 0.7}) {
        const ComplexField f = ComplexField::sample(dom, [gamma](cplx z) {
            return cplx(std::pow(std::abs(z), gamma), 0.0);
        });
        const HolderEstimate est = holder_exponent(f, cplx(0.0, 0.0), radii);
        std::ostringstream name;
        name << "c5.gamma_dev_" << gamma;
        cr.assertions.push_back(
            assert_le(name.str(), std::abs(est.gamma - gamma), 0.03));
    }
    return cr;
}

CriterionResult criterion_6(std::uint64_t seed) {
    (void)seed;
    CriterionResult cr{6, "difference quotients stay quasiregular", {}};
    DomainPtr dom = make_disk(cplx(0.0, 0.0), 1.0, 128);
    const StructureFunction H = power_example(2.0).H;
    const SolverReport r =
        solve_frozen(H, cplx(0.0, 0.0), SolverConfig::defaults(dom));
    cr.assertions.push_back(
        assert_ge("c6.converged", r.converged ? 1.0 : 0.0, 1.0));

    const double h = 4.0 * dom->spacing();
    cr.assertions.push_back(assert_le(
        "c6.dq_distortion_re",
        difference_quotient_qr(r.solution, h, cplx(1.0, 0.0)), 2.1));
    cr.assertions.push_back(assert_le(
        "c6.dq_distortion_im",
        difference_quotient_qr(r.solution, h, cplx(0.0, 1.0)), 2.1));

    const ComplexField de = directional(wirtinger(r.solution), cplx(1.0, 0.0));
    const std::vector<double> radii = default_fit_radii(1.0, 128);
    cr.assertions.push_back(assert_ge(
        "c6.decay_exponent", decay_exponent(de, cplx(0.0, 0.0), radii), 0.9));
    return cr;
}

CriterionResult criterion_7(std::uint64_t seed) {
    CriterionResult cr{7, "inverse structure function", {}};
    Rng rng = criterion_rng(seed, 7);

    double max_round = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const cplx xi = rng.uniform(0.1, 10.0) * rng.unit();
        const cplx zeta = rng.in_disk(cplx(0.0, 0.0), 0.98 * std::abs(xi));
        const cplx back = f_xi_inverse(xi, f_xi(xi, zeta));
        max_round = std::max(max_round,
                             std::abs(back - zeta) / (1.0 + std::abs(zeta)));
    }
    cr.assertions.push_back(assert_le("c7.roundtrip", max_round, 1e-10));

    for (const cplx mu : {cplx(0.5, 0.0), cplx(0.0, 0.3)}) {
        const InverseStructure inv(linear_structure(mu, cplx(0.0, 0.0)));
        double max_err = 0.0, max_def = 0.0;
        for (int i = 0; i < 500; ++i) {
            const cplx g = rng.in_disk(cplx(0.0, 0.0), 1.0);
            const cplx xi = rng.uniform(0.1, 10.0) * rng.unit();
            const cplx hs = h_star(inv, g, xi);
            max_err = std::max(max_err, std::abs(hs + mu * std::conj(xi)));
            // hs is the bijectivity-disk variable, so the relation reads
            // directly without another inversion.
            const double den = std::norm(xi) - std::norm(hs);
            const cplx lhs = -hs / den;
            const cplx rhs = inv.base(g, std::conj(xi) / den);
            max_def = std::max(max_def,
                               std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
        }
        std::ostringstream tag;
        tag << (mu.imag() == 0.0 ? "re" : "im");
        cr.assertions.push_back(
            assert_le("c7.linear_hstar_" + tag.str(), max_err, 1e-9));
        cr.assertions.push_back(
            assert_le("c7.defining_relation_" + tag.str(), max_def, 1e-11));
    }

    for (const double K : {2.0, 3.0}) {
        const double k = (K - 1.0) / (K + 1.0);
        const InverseStructure inv(linear_structure(cplx(k, 0.0), cplx(0.0, 0.0)));
        const double lip = verify_lipschitz_star(inv, 4000, rng);
        std::ostringstream name;
        name << "c7.lipschitz_star_K" << static_cast<int>(K);
        cr.assertions.push_back(
            assert_le(name.str(), lip, inv.k_star + 1e-6));
    }

    DomainPtr dom = make_disk(cplx(0.0, 0.0), 1.0, 128);
    const ComplexField F = ComplexField::sample(
        dom, [](cplx z) { return z + 0.5 * std::conj(z); });
    const double pde_resid =
        verify_inverse_pde(linear_structure(cplx(0.5, 0.0), cplx(0.0, 0.0)), F);
    cr.assertions.push_back(assert_le("c7.inverse_pde", pde_resid, 0.02));
    return cr;
}

CriterionResult criterion_8(std::uint64_t seed) {
    (void)seed;
    CriterionResult cr{8, "Jacobian floor study", {}};
    const std::array<double, 3> R0s{0.25, 0.5, 1.0};
    const std::array<const char*, 3> tags{"R025", "R05", "R1"};

    std::vector<NamedStructure> cases;
    cases.push_back({"zero", linear_structure(cplx(0.0, 0.0), cplx(0.0, 0.0))});
    cases.push_back(
        {"linear", linear_structure(cplx(0.5, 0.0), cplx(0.0, 0.0))});
    cases.push_back({"power_2", power_example(2.0).H});
    cases.push_back({"holder_linear", holder_linear(0.4, 0.5)});

    for (const NamedStructure& s : cases) {
        const std::vector<FloorStudyRow> rows =
            jacobian_floor_study(s.H, R0s, 96);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::string base =
                std::string(s.name) + "_" + tags[i];
            cr.assertions.push_back(assert_le(
                "c8.negfrac_" + base, rows[i].jac.negative_fraction, 0.0));
            cr.assertions.push_back(
                assert_ge("c8.min_J_" + base, rows[i].jac.min_J, 1e-12));
            if (std::string(s.name) == "linear") {
                // Normalization-free floor: any solve of the mu = 0.5
                // equation has J/|dz F|^2 = 1 - 0.25 pointwise.
                cr.assertions.push_back(assert_le(
                    std::string("c8.linear_min_J_dev_") + tags[i],
                    std::abs(rows[i].jac.min_J_ratio - 0.75), 0.02));
            }
        }
    }
    return cr;
}

CriterionResult criterion_9(std::uint64_t seed, const std::string& cli_path) {
    (void)seed;
    CriterionResult cr{9, "seeded suite runs are bitwise reproducible", {}};
    if (cli_path.empty()) {
        cr.assertions.push_back(assert_ge("c9.cli_available", 0.0, 1.0));
        return cr;
    }
    const fs::path dir = fs::temp_directory_path() / "beltrami-determinism";
    std::error_code ec;
    fs::remove_all(dir, ec);
    fs::create_directories(dir);

    const std::string cmd = "\"" + cli_path + "\" suite --seed 42 --out \"" +
                            dir.string() + "\" > /dev/null 2>&1";
    auto read_all = [&]() -> std::string {
        std::ifstream in(dir / "report.json", std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const int rc1 = std::system(cmd.c_str());
    const std::string first = read_all();
    const int rc2 = std::system(cmd.c_str());
    const std::string second = read_all();

    const bool same = !first.empty() && first == second;
    cr.assertions.push_back(
        assert_ge("c9.bitwise_identical", same ? 1.0 : 0.0, 1.0));
    cr.assertions.push_back(
        assert_ge("c9.exit_consistent", rc1 == rc2 ? 1.0 : 0.0, 1.0));
    return cr;
}

}  // namespace

bool CriterionResult::pass() const {
    for (const Assertion& a : assertions)
        if (!a.pass) return false;
    return true;
}

CriterionResult run_criterion(int id, std::uint64_t seed,
                              const std::string& cli_path) {
    switch (id) {
        case 1: return criterion_1(seed);
        case 2: return criterion_2(seed);
        case 3: return criterion_3(seed);
        case 4: return criterion_4(seed);
        case 5: return criterion_5(seed);
        case 6: return criterion_6(seed);
        case 7: return criterion_7(seed);
        case 8: return criterion_8(seed);
        case 9: return criterion_9(seed, cli_path);
        default:
            throw std::invalid_argument("criterion id out of range");
    }
}

}  // namespace beltrami
