#pragma once

#include <limits>
#include <span>
#include <vector>

#include "beltrami/solver.hpp"

namespace beltrami {

struct JacobianReport {
    double min_J;
    cplx argmin;
    double mean_J;
    double negative_fraction;  // share of evaluated nodes with J <= 0
    double min_J_ratio;        // min of J/|dz f|^2 = 1 - |mu_f|^2; unlike
                               // min_J it does not depend on the boundary
                               // normalization of f
};

// J = |dz f|^2 - |dzbar f|^2 over interior nodes (boundary distance above
// 4h) whose distance from the domain center lies in [r_min, r_max).
JacobianReport jacobian(const ComplexField& f, double r_min = 0.0,
                        double r_max = std::numeric_limits<double>::infinity());

// Max of (|dz|+|dzbar|)/(|dz|-|dzbar|) over the same node set; 1 where both
// derivatives vanish (constant maps), infinity when J <= 0 somewhere.
double quasiregularity_constant(
    const ComplexField& f, double r_min = 0.0,
    double r_max = std::numeric_limits<double>::infinity());

// Max distortion of the difference quotient (f(z+he) - f(z))/h over the
// h-shrunk node set. Requires h >= 2 spacing and |e| = 1; off-lattice shifts
// are sampled bilinearly (lattice-aligned shifts are exact).
double difference_quotient_qr(const ComplexField& f, double h, cplx e);

// ||D f||^2_{L2(rho)} (R - rho)^2 / ||f - mean_R f||^2_{L2(R)} around the
// domain center, |D f|^2 = |dz f|^2 + |dzbar f|^2. Zero for constant f.
double caccioppoli_ratio(const ComplexField& f, double rho, double R);

// Log-log slope of rho -> L2 norm of g over the disk (z0, rho).
double decay_exponent(const ComplexField& g, cplx z0,
                      std::span<const double> radii);

struct HolderEstimate {
    double gamma;   // fitted slope minus 1
    double M;       // exp(intercept)
    std::vector<double> radii;   // descending
    std::vector<double> values;  // L2 distance from the sub-disk mean
    double r_squared;
    bool smoother_than_holder;   // gamma at or above the Lipschitz end
};

// Campanato-style fit: log values = log M + (1+gamma) log rho over at least
// five radii in geometric progression. Throws when every value sits at the
// rounding floor.
HolderEstimate holder_exponent(const ComplexField& g, cplx z0,
                               std::span<const double> radii);
HolderEstimate holder_exponent(const GradientField& g, cplx z0,
                               std::span<const double> radii);

// Geometric radii for the fits: 6 terms from 0.4R down, ratio 1/2 but
// floored so the smallest disk spans at least 5 cells in radius.
std::vector<double> default_fit_radii(double domain_radius, int n);

struct FloorStudyRow {
    double R0;
    JacobianReport jac;
};

// For each R0: solve the frozen problem (base id, freezing point 0) on the
// disk of radius 2 R0, then report Jacobian statistics on |z| < R0.
std::vector<FloorStudyRow> jacobian_floor_study(const StructureFunction& H,
                                                std::span<const double> R0s,
                                                int n, double tol = -1.0,
                                                int max_iters = 200);

// r^{-2/K} * integral of J(z, g) over the disk (z0, r), per radius
// (ascending). Nondecreasing, up to small dips, for directional derivatives
// of solutions of autonomous equations.
std::vector<double> jacobian_growth_profile(const ComplexField& g, cplx z0,
                                            std::span<const double> radii,
                                            double K);

}  // namespace beltrami
