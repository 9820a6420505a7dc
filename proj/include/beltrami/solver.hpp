#pragma once

#include <optional>
#include <vector>

#include "beltrami/structure.hpp"
#include "beltrami/transforms.hpp"

namespace beltrami {

struct SolverConfig {
    DomainPtr domain;
    double tol;       // L2 increment threshold
    int max_iters;

    // tol = 1e-8 * sqrt(pi R^2), max_iters = 200.
    static SolverConfig defaults(DomainPtr dom);
};

struct SolverReport {
    ComplexField solution;     // F = C(Psi) + f
    ComplexField fixed_point;  // Psi
    int iterations;
    std::vector<double> increments;  // L2 distance between successive iterates
    double measured_contraction;     // max ratio of consecutive increments
    double final_residual;           // L2 of dzbar F - H(z0, dz F)
    double norm_ratio;               // L2 gradient norm of F over that of f
    double defect_dzbar_norm;        // L2 of Psi  (= dzbar F - dzbar f)
    double defect_dz_norm;           // L2 of S Psi (= dz F - dz f)
    double ellipticity;              // k of the structure used
    bool converged;
};

// Fixed-point solve of the frozen boundary-value problem
//   dzbar F = H(z0, dz F) on the domain disk, Re F = Re f on the circle,
// by iterating Psi -> H(z0, S Psi + dz f) - dzbar f from Psi = 0 (or the
// supplied start). The solution is F = C(Psi) + f at the fixed point.
SolverReport solve_riemann_hilbert(const StructureFunction& H, cplx z0,
                                   const ComplexField& f,
                                   const SolverConfig& cfg,
                                   const ComplexField* initial = nullptr);

// Same with base f = id.
SolverReport solve_frozen(const StructureFunction& H, cplx z0,
                          const SolverConfig& cfg);

// Consecutive increment ratios; empty when fewer than two increments exist.
// Throws if any ratio exceeds ellipticity + 0.05.
std::vector<double> contraction_trace(const SolverReport& report);

}  // namespace beltrami
