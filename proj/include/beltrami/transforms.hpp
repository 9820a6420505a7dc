#pragma once

#include <cstdint>
#include <vector>

#include "beltrami/grid.hpp"

namespace beltrami {

// One piece of a quadrature cell's boundary contour, center-relative
// coordinates. Straight segment a -> b, or the CCW circle arc th0 -> th1
// (th1 >= th0) when `arc` is set.
struct ContourPiece {
    bool arc;
    cplx a, b;
    double th0, th1;
};

// Precomputed quadrature geometry for the disk-local integral operators,
// reusable across applications on the same domain. Sources are the grid
// cells clipped against the circle: interior cells keep their full square
// and node, rim cells carry the clipped area, centroid and contour, and
// cells whose node falls outside the circle but whose clip is nonempty
// (slivers) are kept too, reading their density from the nearest masked
// node. The covered region is then the disk itself up to rounding, which
// is what makes the transform identities hold to quadrature accuracy.
class TransformWorkspace {
public:
    explicit TransformWorkspace(DomainPtr dom);

    const DiskDomain& domain() const { return *dom_; }
    const DomainPtr& domain_ptr() const { return dom_; }

    // Target count (masked nodes) and source count (targets + slivers).
    std::size_t size() const { return zr_.size(); }
    std::size_t sources() const { return cr_.size(); }

    // Target node coordinates, split by component.
    const std::vector<double>& zr() const { return zr_; }
    const std::vector<double>& zi() const { return zi_; }

    // Source quadrature points (clip centroids; exactly the node for full
    // cells), absolute and center-relative, plus clip area / h^2 and the
    // flat node index whose value the source reads.
    const std::vector<double>& cr() const { return cr_; }
    const std::vector<double>& ci() const { return ci_; }
    const std::vector<double>& qr() const { return qr_; }
    const std::vector<double>& qi() const { return qi_; }
    const std::vector<double>& weight() const { return w_; }
    const std::vector<std::uint32_t>& donor_flat() const { return donor_; }

    // Source slot occupying a grid cell, UINT32_MAX when none. Slots below
    // size() are the masked cells in masked-index order.
    std::uint32_t slot_at(std::size_t flat) const { return slot_[flat]; }

    // Clip contour of a source; empty means the full square around its node.
    const std::vector<ContourPiece>& contour(std::uint32_t slot) const {
        return contour_[slot];
    }

private:
    DomainPtr dom_;
    std::vector<double> zr_, zi_;
    std::vector<double> cr_, ci_, qr_, qi_, w_;
    std::vector<std::uint32_t> donor_, slot_;
    std::vector<std::vector<ContourPiece>> contour_;
};

// Disk-local Cauchy transform: quadrature of
//   (1/pi) int [ psi(w)/(z-w)
//              - (z-z0) conj(psi(w)) / (R^2 - (z-z0) conj(w-z0)) ] dA(w)
// over the clipped cells. The singular cell w = z is dropped from the first
// kernel (its symmetric principal value over the centered square vanishes).
// Near-field cells of targets close to the rim, and cells close to the
// reflection point R^2/conj(z-z0) where the second kernel peaks, are
// integrated exactly: both kernels are conj(w)-derivatives of elementary
// functions, so the cell integral reduces to contour integrals over the
// clip boundary.
ComplexField cauchy(const TransformWorkspace& ws, const ComplexField& psi);

// Disk-local Beurling transform, the z-derivative of the above:
//   -(1/pi) int [ psi(w)/(z-w)^2
//               + R^2 conj(psi(w)) / (R^2 - (z-z0) conj(w-z0))^2 ] dA(w),
// same singular-cell and exact-cell conventions.
ComplexField beurling(const TransformWorkspace& ws, const ComplexField& psi);

struct IdentityReport {
    double dbar_residual;      // max interior |dzbar(C psi) - psi|
    double boundary_residual;  // max |Re(C psi)| within 2h of the circle
    double s_residual;         // max interior |S psi - dz(C psi)|
};

// Interior means boundary distance above 2h (all stencils centered there).
IdentityReport verify_cauchy_identities(const TransformWorkspace& ws,
                                        const ComplexField& psi);

}  // namespace beltrami
