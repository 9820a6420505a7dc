#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "beltrami/analysis.hpp"
#include "beltrami/sampling.hpp"

using namespace beltrami;

namespace {

ComplexField sample(DomainPtr dom, const std::function<cplx(cplx)>& f) {
    return ComplexField::sample(dom, f);
}

}  // namespace

TEST_CASE("jacobian statistics on closed forms") {
    auto dom = make_disk(cplx(0, 0), 1.0, 64);

    auto id = sample(dom, [](cplx z) { return z; });
    auto rj = jacobian(id);
    CHECK(rj.min_J == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rj.mean_J == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rj.negative_fraction == 0.0);

    auto stretch = sample(dom, [](cplx z) { return z + 0.5 * std::conj(z); });
    auto rs = jacobian(stretch);
    CHECK(rs.min_J == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(rs.mean_J == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(rs.min_J_ratio == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(rs.negative_fraction == 0.0);

    auto flip = sample(dom, [](cplx z) { return std::conj(z); });
    auto rf = jacobian(flip);
    CHECK(rf.min_J == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(rf.negative_fraction == 1.0);

    auto rw = jacobian(id, 0.2, 0.5);
    const double am = std::abs(rw.argmin);
    CHECK(am >= 0.2);
    CHECK(am < 0.5);
    CHECK_THROWS_AS(jacobian(id, 0.99, 1.0), std::invalid_argument);
}

TEST_CASE("quasiregularity constants of model maps") {
    auto dom = make_disk(cplx(0, 0), 1.0, 64);

    auto id = sample(dom, [](cplx z) { return z; });
    CHECK(quasiregularity_constant(id) == doctest::Approx(1.0).epsilon(1e-9));

    auto stretch = sample(dom, [](cplx z) { return z + 0.5 * std::conj(z); });
    CHECK(quasiregularity_constant(stretch) ==
          doctest::Approx(3.0).epsilon(1e-9));

    auto constf = sample(dom, [](cplx) { return cplx(2, -1); });
    CHECK(quasiregularity_constant(constf) == 1.0);

    auto flip = sample(dom, [](cplx z) { return std::conj(z); });
    CHECK(quasiregularity_constant(flip) ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("model pair distortion sits at the k/3 ratio") {
    // The gradient ratio of f0 is k/3 = 1/9 for K = 2, so the measured
    // distortion on an annulus away from the origin is (1+1/9)/(1-1/9).
    auto ep = power_example(2.0);
    auto dom = make_disk(cplx(0, 0), 1.0, 256);
    auto F0 = sample(dom, [&](cplx z) { return ep.f0(z); });
    const double qr = quasiregularity_constant(F0, 0.2, 0.9);
    CHECK(qr == doctest::Approx(1.25).epsilon(0.016));
}

TEST_CASE("difference quotient distortions") {
    auto dom = make_disk(cplx(0, 0), 1.0, 64);
    const double h = 4.0 * dom->spacing();

    auto id = sample(dom, [](cplx z) { return z; });
    CHECK(difference_quotient_qr(id, h, cplx(1, 0)) ==
          doctest::Approx(1.0).epsilon(1e-12));

    auto sq = sample(dom, [](cplx z) { return z * z; });
    CHECK(difference_quotient_qr(sq, h, cplx(1, 0)) ==
          doctest::Approx(1.0).epsilon(1e-9));

    // f = z^2 + 0.3 conj(z)^2: the quotient field has |dz| = 2, |dzbar| = 0.6
    // for every unit direction, distortion 2.6/1.4.
    auto mix = sample(dom, [](cplx z) {
        return z * z + 0.3 * std::conj(z) * std::conj(z);
    });
    CHECK(difference_quotient_qr(mix, h, cplx(1, 0)) ==
          doctest::Approx(13.0 / 7.0).epsilon(0.02));
    CHECK(difference_quotient_qr(mix, h, cplx(0, 1)) ==
          doctest::Approx(13.0 / 7.0).epsilon(0.02));
    const cplx diag = cplx(1, 1) / std::sqrt(2.0);
    CHECK(difference_quotient_qr(mix, h, diag) ==
          doctest::Approx(13.0 / 7.0).epsilon(0.05));

    // Affine stretch: the quotient is a constant field, distortion 1.
    auto stretch = sample(dom, [](cplx z) { return z + 0.5 * std::conj(z); });
    CHECK(difference_quotient_qr(stretch, h, cplx(1, 0)) == 1.0);

    CHECK_THROWS_AS(difference_quotient_qr(id, dom->spacing(), cplx(1, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(difference_quotient_qr(id, h, cplx(2, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(difference_quotient_qr(id, 3.0, cplx(1, 0)),
                    std::invalid_argument);
}

TEST_CASE("caccioppoli ratios of affine maps") {
    auto dom = make_disk(cplx(0, 0), 1.0, 128);

    auto id = sample(dom, [](cplx z) { return z; });
    CHECK(caccioppoli_ratio(id, 0.5, 1.0) ==
          doctest::Approx(0.125).epsilon(0.05));

    auto constf = sample(dom, [](cplx) { return cplx(3, 1); });
    CHECK(caccioppoli_ratio(constf, 0.5, 1.0) == 0.0);

    auto stretch = sample(dom, [](cplx z) { return z + 0.5 * std::conj(z); });
    const double r = caccioppoli_ratio(stretch, 0.5, 1.0);
    CHECK(r == doctest::Approx(0.125).epsilon(0.05));
    CHECK(r <= 100.0 * 3.0);

    CHECK_THROWS_AS(caccioppoli_ratio(id, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(caccioppoli_ratio(id, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(caccioppoli_ratio(id, 0.5, 2.0), std::invalid_argument);
}

TEST_CASE("decay exponents of monomials") {
    auto dom = make_disk(cplx(0, 0), 1.0, 128);
    const std::vector<double> radii = {0.1, 0.2, 0.4, 0.8};

    auto one = sample(dom, [](cplx) { return cplx(1, 0); });
    CHECK(decay_exponent(one, cplx(0, 0), radii) ==
          doctest::Approx(1.0).epsilon(0.05));

    auto lin = sample(dom, [](cplx z) { return z; });
    CHECK(decay_exponent(lin, cplx(0, 0), radii) ==
          doctest::Approx(2.0).epsilon(0.05));

    const std::vector<double> few = {0.1, 0.2, 0.4};
    CHECK_THROWS_AS(decay_exponent(one, cplx(0, 0), few),
                    std::invalid_argument);
}

TEST_CASE("campanato estimator calibrates on pure powers") {
    auto dom = make_disk(cplx(0, 0), 1.0, 256);
    auto radii = default_fit_radii(1.0, 256);
    for (double gamma : {0.3, 0.5, 0.7}) {
        auto g = sample(dom, [gamma](cplx z) {
            return cplx(std::pow(std::abs(z), gamma), 0.0);
        });
        auto est = holder_exponent(g, cplx(0, 0), radii);
        CHECK(std::abs(est.gamma - gamma) < 0.03);
        CHECK(est.r_squared > 0.99);
        CHECK_FALSE(est.smoother_than_holder);
        CHECK(est.M > 0.0);
    }
}

TEST_CASE("campanato estimator flags smooth fields") {
    auto dom = make_disk(cplx(0, 0), 1.0, 128);
    auto radii = default_fit_radii(1.0, 128);
    auto g = sample(dom, [](cplx z) {
        return 0.3 * z - 0.2 * std::conj(z) + cplx(1, 0);
    });
    auto est = holder_exponent(g, cplx(0, 0), radii);
    CHECK(est.gamma == doctest::Approx(1.0).epsilon(0.02));
    CHECK(est.smoother_than_holder);
}

TEST_CASE("campanato estimate is scale-equivariant") {
    auto dom = make_disk(cplx(0, 0), 1.0, 128);
    auto radii = default_fit_radii(1.0, 128);
    auto g = sample(dom, [](cplx z) {
        return cplx(std::pow(std::abs(z), 0.5), 0.0) + 0.2 * z;
    });
    const cplx lam(2.7, -1.3);
    auto a = holder_exponent(g, cplx(0, 0), radii);
    auto b = holder_exponent(scale(g, lam), cplx(0, 0), radii);
    CHECK(std::abs(a.gamma - b.gamma) < 1e-9);
    CHECK(b.M / a.M == doctest::Approx(std::abs(lam)).epsilon(1e-9));
}

TEST_CASE("campanato guards") {
    auto dom = make_disk(cplx(0, 0), 1.0, 64);
    auto radii = default_fit_radii(1.0, 64);

    auto constf = sample(dom, [](cplx) { return cplx(4, 2); });
    CHECK_THROWS_AS(holder_exponent(constf, cplx(0, 0), radii),
                    std::invalid_argument);

    auto g = sample(dom, [](cplx z) { return z; });
    const std::vector<double> few = {0.4, 0.2, 0.1, 0.05};
    CHECK_THROWS_AS(holder_exponent(g, cplx(0, 0), few),
                    std::invalid_argument);
    const std::vector<double> dup = {0.4, 0.2, 0.2, 0.1, 0.05};
    CHECK_THROWS_AS(holder_exponent(g, cplx(0, 0), dup),
                    std::invalid_argument);
    const std::vector<double> toobig = {1.4, 0.7, 0.35, 0.175, 0.0875};
    CHECK_THROWS_AS(holder_exponent(g, cplx(0, 0), toobig),
                    std::invalid_argument);
}

TEST_CASE("gradient overload measures the model pair exponent") {
    auto ep = power_example(2.0);
    auto dom = make_disk(cplx(0, 0), 1.0, 256);
    auto F0 = sample(dom, [&](cplx z) { return ep.f0(z); });
    auto grad = wirtinger(F0);
    auto radii = default_fit_radii(1.0, 256);
    auto est = holder_exponent(grad, cplx(0, 0), radii);
    CHECK(std::abs(est.gamma - 0.6) < 0.05);
}

TEST_CASE("default fit radii are geometric and floored") {
    auto radii = default_fit_radii(1.0, 128);
    REQUIRE(radii.size() == 6);
    CHECK(radii.front() == doctest::Approx(0.4).epsilon(1e-12));
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        CHECK(radii[i + 1] < radii[i]);
    CHECK(radii.back() >= 5.0 * (2.0 / 128) * (1.0 - 1e-12));
    CHECK_THROWS_AS(default_fit_radii(1.0, 8), std::invalid_argument);
}

TEST_CASE("jacobian floor study") {
    const std::vector<double> R0s = {0.25, 0.5};

    auto zero = linear_structure(cplx(0, 0), cplx(0, 0));
    auto rows = jacobian_floor_study(zero, R0s, 48);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.jac.min_J == doctest::Approx(1.0).epsilon(0.05));
        CHECK(row.jac.negative_fraction == 0.0);
    }
    CHECK(rows[0].R0 == 0.25);

    // mu = 0.5 freezes to F = (1-conj(Psi)) z + Psi conj(z), Psi = 1/3, so
    // the Jacobian sits at (2/3)^2 - (1/3)^2 = 1/3 across the window while
    // the normalized floor J/|dz F|^2 is 1 - |mu|^2 = 0.75 regardless of
    // the boundary normalization.
    auto lin = linear_structure(cplx(0.5, 0), cplx(0, 0));
    auto lrows = jacobian_floor_study(lin, R0s, 48);
    for (const auto& row : lrows) {
        CHECK(row.jac.min_J == doctest::Approx(1.0 / 3.0).epsilon(0.06));
        CHECK(row.jac.min_J_ratio == doctest::Approx(0.75).epsilon(0.04));
        CHECK(row.jac.negative_fraction == 0.0);
    }

    const std::vector<double> bad = {-0.1};
    CHECK_THROWS_AS(jacobian_floor_study(zero, bad, 48),
                    std::invalid_argument);
    CHECK_THROWS_AS(jacobian_floor_study(zero, R0s, 7),
                    std::invalid_argument);
}

TEST_CASE("growth profile is nearly monotone for model solutions") {
    auto dom = make_disk(cplx(0, 0), 1.0, 96);
    auto id = sample(dom, [](cplx z) { return z; });
    const std::vector<double> radii = {0.2, 0.3, 0.4, 0.5, 0.6};
    auto flat = jacobian_growth_profile(id, cplx(0, 0), radii, 2.0);
    REQUIRE(flat.size() == radii.size());
    for (std::size_t i = 0; i + 1 < flat.size(); ++i)
        CHECK(flat[i + 1] >= flat[i] * 0.999);

    auto ep = power_example(2.0);
    auto cfg = SolverConfig::defaults(dom);
    auto rep = solve_frozen(ep.H, cplx(0, 0), cfg);
    REQUIRE(rep.converged);
    auto g = directional(wirtinger(rep.solution), cplx(1, 0));
    auto prof = jacobian_growth_profile(g, cplx(0, 0), radii, ep.K);
    for (std::size_t i = 0; i + 1 < prof.size(); ++i)
        CHECK(prof[i + 1] >= prof[i] * 0.95);

    CHECK_THROWS_AS(jacobian_growth_profile(id, cplx(0, 0), radii, 0.5),
                    std::invalid_argument);
    const std::vector<double> outside = {0.9, 1.2};
    CHECK_THROWS_AS(jacobian_growth_profile(id, cplx(0, 0), outside, 2.0),
                    std::invalid_argument);
}
