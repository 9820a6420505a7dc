#include "beltrami/transforms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "beltrami/parallel.hpp"

namespace beltrami {

namespace {

constexpr std::uint32_t kNoSlot = UINT32_MAX;

struct ClipResult {
    bool full;
    double area;
    cplx centroid;  // center-relative
    std::vector<ContourPiece> pieces;
};

// Intersection of the square [lo, lo+h]^2 with the disk |v| < R, both
// center-relative. The intersection of two convex sets is convex, so walking
// the square edges CCW and bridging each circle exit with the next entry by
// a CCW arc closes the contour. Area and centroid come from the contour
// (Green's theorem; the straight-piece integrands are polynomial, the arc
// ones reduce to sin^3/cos^3 antiderivatives).
ClipResult clip_cell(cplx lo, double h, double R) {
    const double R2 = R * R;
    const cplx corner[4] = {lo, lo + cplx(h, 0.0), lo + cplx(h, h),
                            lo + cplx(0.0, h)};
    bool full = true;
    for (const cplx& c : corner) full = full && std::norm(c) < R2;
    if (full) return {true, h * h, lo + cplx(0.5 * h, 0.5 * h), {}};

    struct Seg {
        cplx p, q;
    };
    Seg segs[4];
    int nseg = 0;
    for (int e = 0; e < 4; ++e) {
        const cplx a = corner[e], b = corner[(e + 1) & 3];
        const cplx dd = b - a;
        const double qa = std::norm(dd);
        const double qb = 2.0 * (dd.real() * a.real() + dd.imag() * a.imag());
        const double qc = std::norm(a) - R2;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc <= 0.0) continue;
        const double sq = std::sqrt(disc);
        const double t0 = (-qb - sq) / (2.0 * qa);
        const double t1 = (-qb + sq) / (2.0 * qa);
        const double u0 = std::max(0.0, t0), u1 = std::min(1.0, t1);
        if (u1 - u0 <= 1e-12) continue;
        segs[nseg++] = {a + dd * u0, a + dd * u1};
    }
    ClipResult r{false, 0.0, cplx(0.0, 0.0), {}};
    if (nseg == 0) return r;

    double area = 0.0, mx = 0.0, my = 0.0;
    auto add_straight = [&](cplx p, cplx q) {
        const cplx dd = q - p;
        area += 0.5 * (p.real() * q.imag() - p.imag() * q.real());
        mx += 0.5 * dd.imag() *
              (p.real() * p.real() + p.real() * dd.real() +
               dd.real() * dd.real() / 3.0);
        my -= 0.5 * dd.real() *
              (p.imag() * p.imag() + p.imag() * dd.imag() +
               dd.imag() * dd.imag() / 3.0);
    };
    auto add_arc = [&](double th0, double th1) {
        area += 0.5 * R2 * (th1 - th0);
        const double s0 = std::sin(th0), s1 = std::sin(th1);
        const double c0 = std::cos(th0), c1 = std::cos(th1);
        mx += 0.5 * R2 * R * ((s1 - s1 * s1 * s1 / 3.0) - (s0 - s0 * s0 * s0 / 3.0));
        my += 0.5 * R2 * R * ((-c1 + c1 * c1 * c1 / 3.0) - (-c0 + c0 * c0 * c0 / 3.0));
    };
    for (int k = 0; k < nseg; ++k) {
        const Seg& s = segs[k];
        r.pieces.push_back({false, s.p, s.q, 0.0, 0.0});
        add_straight(s.p, s.q);
        // Consecutive pieces either share a square corner or are separated
        // by a circle arc; any true gap has both endpoints on the circle.
        const Seg& t = segs[(k + 1) % nseg];
        if (std::abs(s.q - t.p) > 1e-9 * h) {
            double th0 = std::atan2(s.q.imag(), s.q.real());
            double th1 = std::atan2(t.p.imag(), t.p.real());
            while (th1 < th0 - 1e-12) th1 += 2.0 * std::numbers::pi;
            if (th1 - th0 > 1e-12) {
                r.pieces.push_back({true, s.q, t.p, th0, th1});
                add_arc(th0, th1);
            }
        }
    }
    if (!(area > 0.0)) return {false, 0.0, cplx(0.0, 0.0), {}};
    r.area = area;
    r.centroid = cplx(mx / area, my / area);
    return r;
}

// Log increment along a straight path from w0 to w1. The segment misses the
// origin, so it subtends less than a half turn and the principal value of
// log(w1/w0) is the true increment.
inline cplx seg_dlog(cplx w1, cplx w0) { return std::log(w1 / w0); }

// Log increment of v - c along the CCW arc v = R e^{i theta}. Bisect until a
// chunk's chord is short against its endpoint distances from c; the chunk
// then stays inside a zero-free disk around its start and the principal
// value of the ratio log is the true increment.
cplx arc_dlog(cplx c, double R, double th0, double th1, int depth = 0) {
    const cplx w0 = std::polar(R, th0) - c;
    const cplx w1 = std::polar(R, th1) - c;
    if (depth >= 60 ||
        std::abs(w1 - w0) < 0.7 * std::min(std::abs(w0), std::abs(w1)))
        return std::log(w1 / w0);
    const double tm = 0.5 * (th0 + th1);
    return arc_dlog(c, R, th0, tm, depth + 1) +
           arc_dlog(c, R, tm, th1, depth + 1);
}

// The four kernel primitives integrate in closed form along both kinds of
// contour piece. Straight pieces: conj(v) and the reflected denominator are
// affine in the parameter, leaving rational terms plus one ratio log. Arcs:
// conj(v) = R^2 / v turns each integrand into a rational function of v,
// integrated by partial fractions with exact i dtheta for the 1/v part.

// Contour integral of conj(v)/(p - v) dv; p outside the region.
cplx loop_pole1(std::span<const ContourPiece> pieces, double R, cplx p) {
    cplx acc(0.0, 0.0);
    for (const ContourPiece& pc : pieces) {
        if (!pc.arc) {
            const cplx dd = pc.b - pc.a;
            const cplx P = p - pc.a;
            const cplx J0 = -seg_dlog(P - dd, P) / dd;
            acc += dd * std::conj(pc.a) * J0 + std::conj(dd) * (P * J0 - 1.0);
        } else {
            const cplx dth(0.0, pc.th1 - pc.th0);
            acc += (R * R / p) * (dth - arc_dlog(p, R, pc.th0, pc.th1));
        }
    }
    return acc;
}

// Contour integral of conj(v)/(p - v)^2 dv; p outside the region.
cplx loop_pole2(std::span<const ContourPiece> pieces, double R, cplx p) {
    cplx acc(0.0, 0.0);
    for (const ContourPiece& pc : pieces) {
        if (!pc.arc) {
            const cplx dd = pc.b - pc.a;
            const cplx P = p - pc.a;
            const cplx J0 = -seg_dlog(P - dd, P) / dd;
            const cplx I0 = (1.0 / (P - dd) - 1.0 / P) / dd;
            acc += dd * std::conj(pc.a) * I0 + std::conj(dd) * (P * I0 - J0);
        } else {
            const cplx v0 = std::polar(R, pc.th0);
            const cplx v1 = std::polar(R, pc.th1);
            const cplx dth(0.0, pc.th1 - pc.th0);
            acc += (R * R) * ((dth - arc_dlog(p, R, pc.th0, pc.th1)) / (p * p) +
                              (1.0 / (p - v1) - 1.0 / (p - v0)) / p);
        }
    }
    return acc;
}

// Contour integral of (1/u) / (R^2 - u conj(v)) dv; the denominator has no
// zero on the region (the reflection point R^2 u / |u|^2 lies outside the
// circle while the region lies inside).
cplx loop_refl2(std::span<const ContourPiece> pieces, double R, cplx u) {
    const double R2 = R * R;
    cplx acc(0.0, 0.0);
    for (const ContourPiece& pc : pieces) {
        if (!pc.arc) {
            const cplx dd = pc.b - pc.a;
            const cplx B = u * std::conj(dd);
            const cplx A = R2 - u * std::conj(pc.a);
            acc += (dd / u) * (-seg_dlog(A - B, A) / B);
        } else {
            const cplx v0 = std::polar(R, pc.th0);
            const cplx v1 = std::polar(R, pc.th1);
            acc += ((v1 - v0) + u * arc_dlog(u, R, pc.th0, pc.th1)) / (u * R2);
        }
    }
    return acc;
}

// Contour integral of -(1/u) log(den(v)/den(v0)) dv with den(v) =
// R^2 - u conj(v). The denominator image of the convex region is convex and
// zero free, hence inside an open half plane, so the log is single valued
// around the contour and integration by parts removes it:
// the integral equals -loop of (v - v0)/den(v) dconj(v).
cplx loop_refl1(std::span<const ContourPiece> pieces, double R, cplx u,
                cplx v0) {
    const double R2 = R * R;
    cplx acc(0.0, 0.0);
    for (const ContourPiece& pc : pieces) {
        if (!pc.arc) {
            const cplx dd = pc.b - pc.a;
            const cplx B = u * std::conj(dd);
            const cplx A = R2 - u * std::conj(pc.a);
            const cplx J0 = -seg_dlog(A - B, A) / B;
            const cplx J1 = (A * J0 - 1.0) / B;
            acc -= std::conj(dd) * ((pc.a - v0) * J0 + dd * J1);
        } else {
            const cplx dth(0.0, pc.th1 - pc.th0);
            acc += (v0 * dth + (u - v0) * arc_dlog(u, R, pc.th0, pc.th1)) / u;
        }
    }
    return acc;
}

// Integration contour for one source region: the stored clip contour, or
// the four sides of the full square when none is stored. All coordinates
// center-relative. The (1/2i) factor turning these loops into area
// integrals via the complex Green formula is applied at the call sites.
std::span<const ContourPiece> region_pieces(const TransformWorkspace& ws,
                                            std::uint32_t slot,
                                            ContourPiece (&sq)[4]) {
    const auto& pcs = ws.contour(slot);
    if (!pcs.empty()) return {pcs.data(), pcs.size()};
    const DiskDomain& d = ws.domain();
    const double h = d.spacing();
    const cplx node(ws.cr()[slot], ws.ci()[slot]);
    const cplx lo = node - d.center() - cplx(0.5 * h, 0.5 * h);
    sq[0] = {false, lo, lo + cplx(h, 0.0), 0.0, 0.0};
    sq[1] = {false, lo + cplx(h, 0.0), lo + cplx(h, h), 0.0, 0.0};
    sq[2] = {false, lo + cplx(h, h), lo + cplx(0.0, h), 0.0, 0.0};
    sq[3] = {false, lo + cplx(0.0, h), lo, 0.0, 0.0};
    return {sq, 4};
}

struct SourceData {
    std::vector<double> ur, ui;  // area-weighted psi values per source
};

SourceData gather(const TransformWorkspace& ws, const ComplexField& psi) {
    if (!psi.domain().same_geometry(ws.domain()))
        throw std::invalid_argument("field domain does not match the workspace");
    const std::size_t srcs = ws.sources();
    const auto& w = ws.weight();
    const auto& donor = ws.donor_flat();
    SourceData s;
    s.ur.resize(srcs);
    s.ui.resize(srcs);
    for (std::size_t k = 0; k < srcs; ++k) {
        const cplx v = psi.at_flat(donor[k]);
        s.ur[k] = v.real() * w[k];
        s.ui[k] = v.imag() * w[k];
    }
    return s;
}

// The midpoint rule is exact enough away from the two kernel singularities
// (the target itself and its reflection across the circle). Near them the
// per-cell error stops shrinking with h, so those cells are re-integrated
// exactly. This pass handles the principal kernels 1/(z-w), 1/(z-w)^2 in
// two nested collars. Targets within six cells of the rim get every cell
// of a window spanning their whole neighbourhood swapped from midpoint to
// the exact region integral; the self cell keeps its principal-value drop.
// Clipped cells alone are re-integrated over a wider collar: unlike full
// squares, whose midpoint errors cancel across the lattice, a clipped
// cell's centroid-rule error decays only with the cube of its separation
// from the target, so the wide collar grows like (R/h)^(1/3) cells to keep
// that leftover falling under refinement.
void redo_principal(const TransformWorkspace& ws, const ComplexField& psi,
                    bool second_kernel, std::span<cplx> ov) {
    const DiskDomain& d = ws.domain();
    const double R = d.radius();
    const double h = d.spacing();
    const double h2 = h * h;
    const cplx c0 = d.center();
    const int n = d.n();
    const double band = 6.0 * h;
    const int wide =
        std::max(static_cast<int>(std::ceil(band / h)),
                 static_cast<int>(std::ceil(2.2 * std::cbrt(R / h))));
    auto indices = d.masked_indices();
    const auto& cr = ws.cr();
    const auto& ci = ws.ci();
    const auto& wgt = ws.weight();
    const auto& donor = ws.donor_flat();

    parallel_for(0, indices.size(), [&](std::size_t t) {
        const std::uint32_t fl = indices[t];
        // Target coordinates must come from the same stored arrays the main
        // quadrature loop reads: the subtraction below may only see a zero
        // offset exactly where that loop knocked the singular cell out.
        const cplx z(ws.zr()[t], ws.zi()[t]);
        const double bd = d.boundary_distance(z);
        if (bd > wide * h) return;
        const cplx p = z - c0;
        const int ma = bd <= band ? static_cast<int>(std::ceil(bd / h)) + 3 : -1;
        const int m = std::max(ma, wide + 2);
        const int ix = static_cast<int>(fl % static_cast<std::uint32_t>(n));
        const int iy = static_cast<int>(fl / static_cast<std::uint32_t>(n));
        cplx corr(0.0, 0.0);
        for (int jy = std::max(0, iy - m); jy <= std::min(n - 1, iy + m); ++jy)
            for (int jx = std::max(0, ix - m); jx <= std::min(n - 1, ix + m);
                 ++jx) {
                const std::uint32_t slot = ws.slot_at(d.flat(jx, jy));
                if (slot == kNoSlot) continue;
                if (wgt[slot] == 0.0) continue;
                if (wgt[slot] == 1.0 && ws.contour(slot).empty() &&
                    (std::abs(jx - ix) > ma || std::abs(jy - iy) > ma))
                    continue;
                const cplx dz = z - cplx(cr[slot], ci[slot]);
                const double nd = std::norm(dz);
                const cplx val = psi.at_flat(donor[slot]);
                const double mass = wgt[slot] * h2;
                ContourPiece sq[4];
                if (second_kernel) {
                    if (nd != 0.0) corr -= val * (mass / (dz * dz));
                    if (slot != t)
                        corr += val * cplx(0.0, -0.5) *
                                loop_pole2(region_pieces(ws, slot, sq), R, p);
                } else {
                    if (nd != 0.0) corr -= val * (mass / dz);
                    if (slot != t)
                        corr += val * cplx(0.0, -0.5) *
                                loop_pole1(region_pieces(ws, slot, sq), R, p);
                }
            }
        const double sign = second_kernel ? -1.0 : 1.0;
        ov[fl] += corr * (sign / std::numbers::pi);
    });
}

// The reflected kernels peak at the reflection point R^2/conj(u), which sits
// right outside the circle for u near the rim. Midpoint quadrature cannot
// resolve the peak once its width |R^2 - u conj(v)| / |u| drops near the
// cell size, so cells that close to it are re-integrated exactly. Cells
// above the cutoff keep a midpoint error of relative size (R h / cutoff)^2,
// so the cutoff must grow faster than h for the total to vanish under
// refinement; sqrt(R h) R keeps that term at O(h).
double near_diagonal_cutoff(double R, double h) {
    return std::max(6.0 * R * h, std::sqrt(R * h) * R);
}

void redo_reflected(const TransformWorkspace& ws, const ComplexField& psi,
                    bool second_kernel, std::span<cplx> ov) {
    const DiskDomain& d = ws.domain();
    const double R = d.radius();
    const double R2 = R * R;
    const double h = d.spacing();
    const double h2 = h * h;
    const cplx c0 = d.center();
    const double thr = near_diagonal_cutoff(R, h);
    const double thr2 = thr * thr;
    const int n = d.n();
    auto indices = d.masked_indices();
    const auto& qr = ws.qr();
    const auto& qi = ws.qi();
    const auto& wgt = ws.weight();
    const auto& donor = ws.donor_flat();

    parallel_for(0, indices.size(), [&](std::size_t t) {
        const std::uint32_t fl = indices[t];
        const cplx u = cplx(ws.zr()[t], ws.zi()[t]) - c0;
        const double au = std::abs(u);
        if (au < 0.5 * R) return;
        const double rho = thr / au + 1.5 * h;
        const cplx star = (R2 / (au * au)) * u;
        if (std::abs(star) - R > rho) return;

        auto to_index = [&](double offset) {
            return static_cast<int>(std::floor((offset + R) / h - 0.5));
        };
        const int ix0 = std::max(0, to_index(star.real() - rho));
        const int ix1 = std::min(n - 1, to_index(star.real() + rho) + 1);
        const int iy0 = std::max(0, to_index(star.imag() - rho));
        const int iy1 = std::min(n - 1, to_index(star.imag() + rho) + 1);

        cplx corr(0.0, 0.0);
        for (int jy = iy0; jy <= iy1; ++jy)
            for (int jx = ix0; jx <= ix1; ++jx) {
                const std::uint32_t slot = ws.slot_at(d.flat(jx, jy));
                if (slot == kNoSlot) continue;
                if (wgt[slot] == 0.0) continue;
                const cplx q(qr[slot], qi[slot]);
                const cplx den = R2 - u * std::conj(q);
                if (std::norm(den) >= thr2) continue;
                const cplx val = std::conj(psi.at_flat(donor[slot]));
                const double mass = wgt[slot] * h2;
                ContourPiece sq[4];
                const auto pcs = region_pieces(ws, slot, sq);
                if (second_kernel) {
                    const cplx exact =
                        cplx(0.0, -0.5) * loop_refl2(pcs, R, u);
                    corr += val * (R2 * exact - R2 * mass / (den * den));
                } else {
                    const cplx exact =
                        cplx(0.0, -0.5) * loop_refl1(pcs, R, u, q);
                    corr += val * (u * exact - u * mass / den);
                }
            }
        ov[fl] -= corr / std::numbers::pi;
    });
}

}  // namespace

TransformWorkspace::TransformWorkspace(DomainPtr dom) : dom_(std::move(dom)) {
    const DiskDomain& d = *dom_;
    const double R = d.radius();
    const double h = d.spacing();
    const cplx c0 = d.center();
    const int n = d.n();
    const std::size_t count = d.size();
    zr_.reserve(count);
    zi_.reserve(count);
    cr_.reserve(count);
    ci_.reserve(count);
    qr_.reserve(count);
    qi_.reserve(count);
    w_.reserve(count);
    donor_.reserve(count);
    contour_.reserve(count);
    slot_.assign(static_cast<std::size_t>(n) * n, kNoSlot);

    auto push_node = [&](cplx z, cplx v) {
        cr_.push_back(z.real());
        ci_.push_back(z.imag());
        qr_.push_back(v.real());
        qi_.push_back(v.imag());
    };

    for (std::uint32_t idx : d.masked_indices()) {
        const cplx z = d.node_flat(idx);
        const cplx v = z - c0;
        zr_.push_back(z.real());
        zi_.push_back(z.imag());
        slot_[idx] = static_cast<std::uint32_t>(cr_.size());
        donor_.push_back(idx);
        // A node deeper than half a cell diagonal keeps its full square.
        if (d.boundary_distance(z) > 0.7072 * h) {
            push_node(z, v);
            w_.push_back(1.0);
            contour_.emplace_back();
            continue;
        }
        ClipResult c = clip_cell(v - cplx(0.5 * h, 0.5 * h), h, R);
        if (c.full || c.area <= 1e-12 * h * h) {
            push_node(z, v);
            w_.push_back(c.full ? 1.0 : 0.0);
            contour_.emplace_back();
            continue;
        }
        push_node(c0 + c.centroid, c.centroid);
        w_.push_back(c.area / (h * h));
        contour_.push_back(std::move(c.pieces));
    }

    // Cells whose node fell outside the circle can still overlap the disk;
    // cover those slivers too, reading the nearest masked node's value, so
    // the quadrature domain is the whole disk.
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            if (d.masked(ix, iy)) continue;
            const cplx z = d.node(ix, iy);
            if (d.boundary_distance(z) <= -0.7072 * h) continue;
            ClipResult c = clip_cell(z - c0 - cplx(0.5 * h, 0.5 * h), h, R);
            if (c.full || c.area <= 1e-12 * h * h) continue;
            const cplx ga = c0 + c.centroid;
            std::uint32_t best = kNoSlot;
            double best_d = 0.0;
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx) {
                    const int jx = ix + dx, jy = iy + dy;
                    if (!d.masked(jx, jy)) continue;
                    const double dist = std::abs(d.node(jx, jy) - ga);
                    if (best == kNoSlot || dist < best_d) {
                        best = static_cast<std::uint32_t>(d.flat(jx, jy));
                        best_d = dist;
                    }
                }
            if (best == kNoSlot) continue;
            slot_[d.flat(ix, iy)] = static_cast<std::uint32_t>(cr_.size());
            push_node(ga, c.centroid);
            w_.push_back(c.area / (h * h));
            donor_.push_back(best);
            contour_.push_back(std::move(c.pieces));
        }
}

ComplexField cauchy(const TransformWorkspace& ws, const ComplexField& psi) {
    const SourceData src = gather(ws, psi);
    const std::size_t count = ws.size();
    const std::size_t srcs = ws.sources();
    const double R2 = ws.domain().radius() * ws.domain().radius();
    const cplx c0 = ws.domain().center();
    const double h = ws.domain().spacing();
    const double w = h * h / std::numbers::pi;
    const double* zr = ws.zr().data();
    const double* zi = ws.zi().data();
    const double* cr = ws.cr().data();
    const double* ci = ws.ci().data();
    const double* qr = ws.qr().data();
    const double* qi = ws.qi().data();
    const double* ur = src.ur.data();
    const double* ui = src.ui.data();

    ComplexField out(ws.domain_ptr());
    std::span<cplx> ov = out.raw_mutable();
    auto indices = ws.domain().masked_indices();

    parallel_for(0, count, [&](std::size_t t) {
        const double ztr = zr[t], zti = zi[t];
        const double pr = ztr - c0.real(), pi = zti - c0.imag();
        double t1r = 0.0, t1i = 0.0, t2r = 0.0, t2i = 0.0;
        for (std::size_t s = 0; s < srcs; ++s) {
            const double dr = ztr - cr[s];
            const double di = zti - ci[s];
            const double nd = dr * dr + di * di;
            // Knock out the singular cell without producing infinities.
            const double keep = nd == 0.0 ? 0.0 : 1.0;
            const double rd = keep / (nd + (1.0 - keep));
            t1r += (ur[s] * dr + ui[s] * di) * rd;
            t1i += (ui[s] * dr - ur[s] * di) * rd;
            const double ar = R2 - (pr * qr[s] + pi * qi[s]);
            const double ai = pr * qi[s] - pi * qr[s];
            const double ra = 1.0 / (ar * ar + ai * ai);
            t2r += (ur[s] * ar - ui[s] * ai) * ra;
            t2i -= (ur[s] * ai + ui[s] * ar) * ra;
        }
        ov[indices[t]] = cplx(w * (t1r - (pr * t2r - pi * t2i)),
                              w * (t1i - (pr * t2i + pi * t2r)));
    });
    redo_principal(ws, psi, false, ov);
    redo_reflected(ws, psi, false, ov);
    return out;
}

ComplexField beurling(const TransformWorkspace& ws, const ComplexField& psi) {
    const SourceData src = gather(ws, psi);
    const std::size_t count = ws.size();
    const std::size_t srcs = ws.sources();
    const double R2 = ws.domain().radius() * ws.domain().radius();
    const cplx c0 = ws.domain().center();
    const double h = ws.domain().spacing();
    const double w = h * h / std::numbers::pi;
    const double* zr = ws.zr().data();
    const double* zi = ws.zi().data();
    const double* cr = ws.cr().data();
    const double* ci = ws.ci().data();
    const double* qr = ws.qr().data();
    const double* qi = ws.qi().data();
    const double* ur = src.ur.data();
    const double* ui = src.ui.data();

    ComplexField out(ws.domain_ptr());
    std::span<cplx> ov = out.raw_mutable();
    auto indices = ws.domain().masked_indices();

    parallel_for(0, count, [&](std::size_t t) {
        const double ztr = zr[t], zti = zi[t];
        const double pr = ztr - c0.real(), pi = zti - c0.imag();
        double t1r = 0.0, t1i = 0.0, t2r = 0.0, t2i = 0.0;
        for (std::size_t s = 0; s < srcs; ++s) {
            const double dr = ztr - cr[s];
            const double di = zti - ci[s];
            const double nd = dr * dr + di * di;
            const double keep = nd == 0.0 ? 0.0 : 1.0;
            const double rd = keep / (nd + (1.0 - keep));
            // 1/(z-w)^2 = (conj(z-w)/|z-w|^2)^2
            const double er = dr * rd, ei = -di * rd;
            const double w1r = er * er - ei * ei;
            const double w1i = 2.0 * er * ei;
            t1r += ur[s] * w1r - ui[s] * w1i;
            t1i += ur[s] * w1i + ui[s] * w1r;
            const double ar = R2 - (pr * qr[s] + pi * qi[s]);
            const double ai = pr * qi[s] - pi * qr[s];
            const double ra = 1.0 / (ar * ar + ai * ai);
            const double fr = ar * ra, fi = -ai * ra;
            const double w2r = fr * fr - fi * fi;
            const double w2i = 2.0 * fr * fi;
            t2r += ur[s] * w2r + ui[s] * w2i;
            t2i += ur[s] * w2i - ui[s] * w2r;
        }
        ov[indices[t]] =
            cplx(-w * (t1r + R2 * t2r), -w * (t1i + R2 * t2i));
    });
    redo_principal(ws, psi, true, ov);
    redo_reflected(ws, psi, true, ov);
    return out;
}

IdentityReport verify_cauchy_identities(const TransformWorkspace& ws,
                                        const ComplexField& psi) {
    const ComplexField C = cauchy(ws, psi);
    const ComplexField S = beurling(ws, psi);
    const GradientField g = wirtinger(C);
    const DiskDomain& d = ws.domain();
    const double margin = 2.0 * d.spacing();
    IdentityReport rep{0.0, 0.0, 0.0};
    for (std::uint32_t idx : d.masked_indices()) {
        const cplx z = d.node_flat(idx);
        const double bd = d.boundary_distance(z);
        if (bd > margin) {
            rep.dbar_residual = std::max(
                rep.dbar_residual, std::abs(g.dzbar.at_flat(idx) - psi.at_flat(idx)));
            rep.s_residual = std::max(
                rep.s_residual, std::abs(S.at_flat(idx) - g.dz.at_flat(idx)));
        } else {
            rep.boundary_residual =
                std::max(rep.boundary_residual, std::abs(C.at_flat(idx).real()));
        }
    }
    return rep;
}

}  // namespace beltrami
