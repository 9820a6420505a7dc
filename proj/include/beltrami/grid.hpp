#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace beltrami {

using cplx = std::complex<double>;

// Cell-centered Cartesian grid restricted to an open disk.
// Nodes live at center + (-R + (ix+1/2)h) + i(-R + (iy+1/2)h), h = 2R/n,
// masked iff strictly inside the disk. Immutable once built.
class DiskDomain {
public:
    DiskDomain(cplx center, double radius, int n);

    cplx center() const { return center_; }
    double radius() const { return radius_; }
    int n() const { return n_; }
    double spacing() const { return spacing_; }

    bool in_grid(int ix, int iy) const {
        return ix >= 0 && ix < n_ && iy >= 0 && iy < n_;
    }
    bool masked(int ix, int iy) const {
        return in_grid(ix, iy) && mask_[flat(ix, iy)] != 0;
    }
    bool masked_flat(std::size_t idx) const { return mask_[idx] != 0; }

    cplx node(int ix, int iy) const {
        return center_ + cplx(-radius_ + (ix + 0.5) * spacing_,
                              -radius_ + (iy + 0.5) * spacing_);
    }
    cplx node_flat(std::size_t idx) const {
        return node(static_cast<int>(idx % n_), static_cast<int>(idx / n_));
    }

    std::size_t flat(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * n_ + ix;
    }

    // Count of masked nodes.
    std::size_t size() const { return masked_.size(); }
    // Flat indices of masked nodes, ascending (row-major traversal order).
    std::span<const std::uint32_t> masked_indices() const { return masked_; }

    double boundary_distance(cplx z) const {
        return radius_ - std::abs(z - center_);
    }
    // Masked and further than `margin` from the circle.
    bool interior(int ix, int iy, double margin) const {
        return masked(ix, iy) && boundary_distance(node(ix, iy)) > margin;
    }

    bool same_geometry(const DiskDomain& other) const {
        return center_ == other.center_ && radius_ == other.radius_ &&
               n_ == other.n_;
    }

private:
    cplx center_;
    double radius_;
    int n_;
    double spacing_;
    std::vector<std::uint8_t> mask_;
    std::vector<std::uint32_t> masked_;
};

using DomainPtr = std::shared_ptr<const DiskDomain>;

DomainPtr make_disk(cplx center, double radius, int n);

// Complex values on the masked nodes of a DiskDomain. Dense storage, zero
// off-mask; checked access throws off-mask. Treat as immutable after the
// producing operation returns.
class ComplexField {
public:
    explicit ComplexField(DomainPtr dom);

    static ComplexField sample(DomainPtr dom,
                               const std::function<cplx(cplx)>& f);

    const DiskDomain& domain() const { return *dom_; }
    const DomainPtr& domain_ptr() const { return dom_; }

    cplx at(int ix, int iy) const;
    void set(int ix, int iy, cplx v);

    cplx at_flat(std::size_t idx) const { return values_[idx]; }
    std::span<const cplx> raw() const { return values_; }
    std::span<cplx> raw_mutable() { return values_; }

private:
    DomainPtr dom_;
    std::vector<cplx> values_;
};

// Wirtinger derivative pair of a field, on the same domain.
struct GradientField {
    ComplexField dz;
    ComplexField dzbar;
};

// dz = (fx - i fy)/2, dzbar = (fx + i fy)/2. Centered second-order stencils
// where both axis neighbors are masked, one-sided first-order where exactly
// one is, zero where the axis has no masked neighbor (only occurs inside the
// boundary collar where no accuracy is claimed).
GradientField wirtinger(const ComplexField& f);

// Same stencil rules on an arbitrary validity mask over the same grid
// geometry; entries outside `valid` are ignored.
GradientField wirtinger_masked(const ComplexField& f,
                               std::span<const std::uint8_t> valid);

// Directional derivative field e*dz + conj(e)*dzbar.
ComplexField directional(const GradientField& g, cplx e);

// L2 norm over the sub-disk |z - c| < sub_radius with uniform weight h^2.
// The one-argument forms center on the domain center.
double l2_norm(const ComplexField& f);
double l2_norm(const ComplexField& f, double sub_radius);
double l2_norm(const ComplexField& f, cplx c, double sub_radius);

cplx mean(const ComplexField& f);
cplx mean(const ComplexField& f, double sub_radius);
cplx mean(const ComplexField& f, cplx c, double sub_radius);

// Pointwise combinations (domains must match).
ComplexField add(const ComplexField& a, const ComplexField& b);
ComplexField sub(const ComplexField& a, const ComplexField& b);
ComplexField scale(const ComplexField& a, cplx s);
double l2_distance(const ComplexField& a, const ComplexField& b);

// Bilinear interpolation at an arbitrary point. Weights are renormalized
// over the masked corners of the enclosing cell; returns nullopt when no
// corner is masked. Exact at node coordinates.
std::optional<cplx> interpolate(const ComplexField& f, cplx z);

// CSV dump of masked nodes in row-major order, header
// re_z,im_z,re_f,im_f, shortest round-trip float formatting.
void write_field_csv(const std::string& path, const ComplexField& f);
// Rejects files whose node set disagrees with the declared domain.
ComplexField read_field_csv(const std::string& path, DomainPtr dom);

// Writes to path + ".tmp" then renames.
void atomic_write_text(const std::string& path, const std::string& content);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace beltrami
