#pragma once

#include <functional>

#include "beltrami/grid.hpp"
#include "beltrami/sampling.hpp"

namespace beltrami {

enum class StructureKind { linear, autonomous, frozen, custom };

// Right-hand side H(z, xi) of dzbar f = H(z, dz f), together with its
// declared constants: ellipticity k = (K-1)/(K+1) < 1 (Lipschitz bound in
// xi), Hoelder exponent alpha and constant holder_const for the
// z-dependence, and H(z, 0) = 0. Immutable.
class StructureFunction {
public:
    using Eval = std::function<cplx(cplx, cplx)>;

    StructureFunction(Eval eval, StructureKind kind, double k, double alpha,
                      double holder_const);

    cplx operator()(cplx z, cplx xi) const { return eval_(z, xi); }

    double k() const { return k_; }
    double K() const { return (1.0 + k_) / (1.0 - k_); }
    double alpha() const { return alpha_; }
    double holder_const() const { return holder_const_; }
    StructureKind kind() const { return kind_; }

private:
    Eval eval_;
    StructureKind kind_;
    double k_;
    double alpha_;
    double holder_const_;
};

// H(z, xi) = mu*xi + nu*conj(xi); requires |mu| + |nu| < 1.
StructureFunction linear_structure(cplx mu, cplx nu, double alpha = 0.5);

// H(z, xi) = amplitude * |z|^alpha / (1 + |z|^alpha) * xi. Lipschitz
// constant amplitude (approached as |z| grows), Hoelder constant
// amplitude / 2 in z.
StructureFunction holder_linear(double amplitude, double alpha);

// Distortion-K model pair: f0(z) = z^2 |z|^(a-1) with a = 3/(2K+1) solves
// the autonomous equation with H(xi) = -(k/3) xi^2 / conj(xi).
struct ExtremalPair {
    StructureFunction H;
    double K;
    double k;
    double a;

    cplx f0(cplx z) const;
    cplx f0_dz(cplx z) const;
    cplx f0_dzbar(cplx z) const;
};

ExtremalPair power_example(double K);

// Autonomous H0(xi) = H(z0, xi); drops the z-dependence.
StructureFunction freeze(const StructureFunction& H, cplx z0);

struct ConditionReport {
    double max_lipschitz;      // sup |H(z,x1)-H(z,x2)| / |x1-x2|
    double max_holder;         // sup |H(z1,x)-H(z2,x)| / (|z1-z2|^alpha 2|x|)
    double max_at_zero;        // sup |H(z,0)|
    bool violation;            // any quotient above metadata by > 1e-6
};

// Monte Carlo check of the declared constants; z drawn from the domain disk,
// xi from the disk of radius 10.
ConditionReport verify_condition(const StructureFunction& H,
                                 const DiskDomain& domain, int samples,
                                 Rng& rng);

struct LinearCoefficients {
    cplx mu;
    cplx nu;
};

// Coefficients of the linearized equation at xi,
//   mu = H_xi / (1 - |H_xibar|^2),
//   nu = conj(H_xi) H_xibar / (1 - |H_xibar|^2),
// from central differences with step 1e-5 * max(1, |xi|). Throws if the
// difference quotients disagree across step halving or fail a diagonal
// consistency probe (H not C^1 at xi). Post-condition |mu|+|nu| <= k + 1e-4.
LinearCoefficients linearize(const StructureFunction& H, cplx xi,
                             cplx z = cplx(0.0, 0.0));

}  // namespace beltrami
