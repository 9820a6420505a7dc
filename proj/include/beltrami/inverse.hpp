#pragma once

#include "beltrami/structure.hpp"

namespace beltrami {

// Structure function of the inverse map: when f solves
// dzbar f = H(z, dz f), its inverse g satisfies dwbar g = H*(g, dw g).
// H*(g, .) is Lipschitz with constant k* = (K^3-1)/(K^3+1) and vanishes at 0.
struct InverseStructure {
    StructureFunction base;
    double k_star;
    double tol = 1e-12;
    int max_iters = 500;

    explicit InverseStructure(StructureFunction H);
};

// F_xi(zeta) = -zeta / (|xi|^2 - |zeta|^2), radially monotone, hence a
// bijection of |zeta| <= k_bound |xi| onto a disk. Requires xi != 0 and
// |zeta| <= k_bound |xi|.
cplx f_xi(cplx xi, cplx zeta, double k_bound = 1.0);

// Closed-form inverse of the above; the preimage modulus is the positive
// root of r^2 |zp| + r - |zp||xi|^2 = 0. Post-condition: mapping the result
// forward reproduces zp to 1e-10 relative accuracy.
cplx f_xi_inverse(cplx xi, cplx zp, double k_bound = 1.0);

// Value H*(g, xi): fixed point of
//   zp -> H(g, conj(xi) / (|xi|^2 - |F_xi^{-1}(zp)|^2))
// started at zp = 0, mapped back through F_xi^{-1}. Post-condition: the
// defining relation
//   -zeta/(|xi|^2-|zeta|^2) = H(g, conj(xi)/(|xi|^2-|zeta|^2))
// holds to 10 * tol (relative).
cplx h_star(const InverseStructure& inv, cplx g, cplx xi);

// Max sampled Lipschitz quotient of H*(g, .); g from the unit disk, xi from
// an annulus of the radius-10 disk.
double verify_lipschitz_star(const InverseStructure& inv, int samples,
                             Rng& rng);

struct HolderStarReport {
    double max_quotient;      // sup |H*(g1,x)-H*(g2,x)| / (|g1-g2|^alpha |x|)
    double scaling_exponent;  // fitted decay rate of the numerator in |g1-g2|
};

// Autonomous bases give a zero quotient and a zero exponent.
HolderStarReport verify_holder_star(const InverseStructure& inv, int samples,
                                    Rng& rng);

// Inverts the discrete homeomorphism F on a sub-disk of half the image
// radius (Newton on a bilinear interpolant) and returns
// max |dwbar g - H*(g, dw g)| over the interior of that sub-grid.
// Throws when a nonpositive Jacobian is met (F not injective there).
double verify_inverse_pde(const StructureFunction& H, const ComplexField& F,
                          int image_n = 64);

}  // namespace beltrami
