#include "beltrami/grid.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace beltrami {

DiskDomain::DiskDomain(cplx center, double radius, int n)
    : center_(center), radius_(radius), n_(n) {
    if (!(radius > 0.0)) throw std::invalid_argument("disk radius must be positive");
    if (n < 8) throw std::invalid_argument("grid resolution must be at least 8");
    if (n % 2 != 0) throw std::invalid_argument("grid resolution must be even");
    spacing_ = 2.0 * radius / n;
    mask_.assign(static_cast<std::size_t>(n) * n, 0);
    const double r2 = radius * radius;
    for (int iy = 0; iy < n; ++iy) {
        const double y = -radius + (iy + 0.5) * spacing_;
        for (int ix = 0; ix < n; ++ix) {
            const double x = -radius + (ix + 0.5) * spacing_;
            if (x * x + y * y < r2) {
                const std::size_t idx = flat(ix, iy);
                mask_[idx] = 1;
                masked_.push_back(static_cast<std::uint32_t>(idx));
            }
        }
    }
}

DomainPtr make_disk(cplx center, double radius, int n) {
    return std::make_shared<const DiskDomain>(center, radius, n);
}

ComplexField::ComplexField(DomainPtr dom)
    : dom_(std::move(dom)),
      values_(static_cast<std::size_t>(dom_->n()) * dom_->n(), cplx(0.0, 0.0)) {}

ComplexField ComplexField::sample(DomainPtr dom,
                                  const std::function<cplx(cplx)>& f) {
    ComplexField out(std::move(dom));
    const DiskDomain& d = out.domain();
    for (std::uint32_t idx : d.masked_indices())
        out.values_[idx] = f(d.node_flat(idx));
    return out;
}

cplx ComplexField::at(int ix, int iy) const {
    if (!dom_->masked(ix, iy))
        throw std::out_of_range("field access outside the disk mask");
    return values_[dom_->flat(ix, iy)];
}

void ComplexField::set(int ix, int iy, cplx v) {
    if (!dom_->masked(ix, iy))
        throw std::out_of_range("field write outside the disk mask");
    values_[dom_->flat(ix, iy)] = v;
}

namespace {

void require_same_domain(const ComplexField& a, const ComplexField& b) {
    if (!a.domain().same_geometry(b.domain()))
        throw std::invalid_argument("fields live on different domains");
}

GradientField gradient_impl(const ComplexField& f,
                            std::span<const std::uint8_t> valid) {
    const DiskDomain& d = f.domain();
    const int n = d.n();
    const double h = d.spacing();
    GradientField g{ComplexField(f.domain_ptr()), ComplexField(f.domain_ptr())};
    auto ok = [&](int ix, int iy) {
        return ix >= 0 && ix < n && iy >= 0 && iy < n &&
               valid[static_cast<std::size_t>(iy) * n + ix] != 0;
    };
    auto val = [&](int ix, int iy) {
        return f.at_flat(static_cast<std::size_t>(iy) * n + ix);
    };
    std::span<cplx> dz = g.dz.raw_mutable();
    std::span<cplx> dzbar = g.dzbar.raw_mutable();
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            if (!ok(ix, iy)) continue;
            cplx fx(0.0, 0.0), fy(0.0, 0.0);
            const bool xm = ok(ix - 1, iy), xp = ok(ix + 1, iy);
            if (xm && xp)
                fx = (val(ix + 1, iy) - val(ix - 1, iy)) / (2.0 * h);
            else if (xp)
                fx = (val(ix + 1, iy) - val(ix, iy)) / h;
            else if (xm)
                fx = (val(ix, iy) - val(ix - 1, iy)) / h;
            const bool ym = ok(ix, iy - 1), yp = ok(ix, iy + 1);
            if (ym && yp)
                fy = (val(ix, iy + 1) - val(ix, iy - 1)) / (2.0 * h);
            else if (yp)
                fy = (val(ix, iy + 1) - val(ix, iy)) / h;
            else if (ym)
                fy = (val(ix, iy) - val(ix, iy - 1)) / h;
            const std::size_t idx = d.flat(ix, iy);
            const cplx ify(-fy.imag(), fy.real());
            dz[idx] = 0.5 * (fx - ify);
            dzbar[idx] = 0.5 * (fx + ify);
        }
    }
    return g;
}

}  // namespace

GradientField wirtinger(const ComplexField& f) {
    const DiskDomain& d = f.domain();
    const int n = d.n();
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(n) * n, 0);
    for (std::uint32_t idx : d.masked_indices()) valid[idx] = 1;
    return gradient_impl(f, valid);
}

GradientField wirtinger_masked(const ComplexField& f,
                               std::span<const std::uint8_t> valid) {
    const std::size_t want =
        static_cast<std::size_t>(f.domain().n()) * f.domain().n();
    if (valid.size() != want)
        throw std::invalid_argument("validity mask size mismatch");
    return gradient_impl(f, valid);
}

ComplexField directional(const GradientField& g, cplx e) {
    require_same_domain(g.dz, g.dzbar);
    ComplexField out(g.dz.domain_ptr());
    std::span<cplx> o = out.raw_mutable();
    const cplx ec = std::conj(e);
    for (std::uint32_t idx : out.domain().masked_indices())
        o[idx] = e * g.dz.at_flat(idx) + ec * g.dzbar.at_flat(idx);
    return out;
}

namespace {

template <typename Acc>
void sum_subdisk(const ComplexField& f, cplx c, double rho, Acc&& acc) {
    const DiskDomain& d = f.domain();
    if (rho > d.radius() + 1e-12)
        throw std::invalid_argument("sub-disk radius exceeds the domain radius");
    if (std::abs(c - d.center()) + rho > d.radius() + 1e-9 * d.radius())
        throw std::invalid_argument("sub-disk is not contained in the domain");
    const double r2 = rho * rho;
    for (std::uint32_t idx : d.masked_indices()) {
        const cplx z = d.node_flat(idx);
        if (std::norm(z - c) < r2) acc(f.at_flat(idx));
    }
}

}  // namespace

double l2_norm(const ComplexField& f, cplx c, double sub_radius) {
    const double w = f.domain().spacing() * f.domain().spacing();
    double s = 0.0;
    sum_subdisk(f, c, sub_radius, [&](cplx v) { s += std::norm(v); });
    return std::sqrt(s * w);
}

double l2_norm(const ComplexField& f, double sub_radius) {
    return l2_norm(f, f.domain().center(), sub_radius);
}

double l2_norm(const ComplexField& f) {
    return l2_norm(f, f.domain().center(), f.domain().radius());
}

cplx mean(const ComplexField& f, cplx c, double sub_radius) {
    cplx s(0.0, 0.0);
    std::size_t count = 0;
    sum_subdisk(f, c, sub_radius, [&](cplx v) {
        s += v;
        ++count;
    });
    if (count == 0)
        throw std::invalid_argument("sub-disk contains no grid nodes");
    return s / static_cast<double>(count);
}

cplx mean(const ComplexField& f, double sub_radius) {
    return mean(f, f.domain().center(), sub_radius);
}

cplx mean(const ComplexField& f) {
    return mean(f, f.domain().center(), f.domain().radius());
}

ComplexField add(const ComplexField& a, const ComplexField& b) {
    require_same_domain(a, b);
    ComplexField out(a.domain_ptr());
    std::span<cplx> o = out.raw_mutable();
    for (std::uint32_t idx : out.domain().masked_indices())
        o[idx] = a.at_flat(idx) + b.at_flat(idx);
    return out;
}

ComplexField sub(const ComplexField& a, const ComplexField& b) {
    require_same_domain(a, b);
    ComplexField out(a.domain_ptr());
    std::span<cplx> o = out.raw_mutable();
    for (std::uint32_t idx : out.domain().masked_indices())
        o[idx] = a.at_flat(idx) - b.at_flat(idx);
    return out;
}

ComplexField scale(const ComplexField& a, cplx s) {
    ComplexField out(a.domain_ptr());
    std::span<cplx> o = out.raw_mutable();
    for (std::uint32_t idx : out.domain().masked_indices())
        o[idx] = s * a.at_flat(idx);
    return out;
}

double l2_distance(const ComplexField& a, const ComplexField& b) {
    require_same_domain(a, b);
    const double w = a.domain().spacing() * a.domain().spacing();
    double s = 0.0;
    for (std::uint32_t idx : a.domain().masked_indices())
        s += std::norm(a.at_flat(idx) - b.at_flat(idx));
    return std::sqrt(s * w);
}

std::optional<cplx> interpolate(const ComplexField& f, cplx z) {
    const DiskDomain& d = f.domain();
    const double h = d.spacing();
    const cplx lo = d.center() - cplx(d.radius(), d.radius());
    const double u = (z.real() - lo.real()) / h - 0.5;
    const double v = (z.imag() - lo.imag()) / h - 0.5;
    const int i0 = static_cast<int>(std::floor(u));
    const int j0 = static_cast<int>(std::floor(v));
    const double a = u - i0, b = v - j0;
    const double wts[4] = {(1.0 - a) * (1.0 - b), a * (1.0 - b),
                           (1.0 - a) * b, a * b};
    const int di[4] = {0, 1, 0, 1};
    const int dj[4] = {0, 0, 1, 1};
    cplx acc(0.0, 0.0);
    double wsum = 0.0;
    for (int c = 0; c < 4; ++c) {
        const int ix = i0 + di[c], iy = j0 + dj[c];
        if (!d.masked(ix, iy)) continue;
        acc += wts[c] * f.at_flat(d.flat(ix, iy));
        wsum += wts[c];
    }
    if (wsum <= 0.0) return std::nullopt;
    return acc / wsum;
}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void atomic_write_text(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void write_field_csv(const std::string& path, const ComplexField& f) {
    std::string out;
    out.reserve(f.domain().size() * 64 + 32);
    out += "re_z,im_z,re_f,im_f\n";
    const DiskDomain& d = f.domain();
    for (std::uint32_t idx : d.masked_indices()) {
        const cplx z = d.node_flat(idx);
        const cplx v = f.at_flat(idx);
        out += format_double(z.real());
        out += ',';
        out += format_double(z.imag());
        out += ',';
        out += format_double(v.real());
        out += ',';
        out += format_double(v.imag());
        out += '\n';
    }
    atomic_write_text(path, out);
}

ComplexField read_field_csv(const std::string& path, DomainPtr dom) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "re_z,im_z,re_f,im_f")
        throw std::runtime_error(path + ": bad or missing header");
    ComplexField out(dom);
    std::span<cplx> vals = out.raw_mutable();
    const DiskDomain& d = out.domain();
    const double coord_tol = 1e-9 * std::max(1.0, d.radius());
    std::size_t row = 0;
    auto indices = d.masked_indices();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= indices.size())
            throw std::runtime_error(path + ": more rows than domain nodes");
        double c[4];
        std::size_t pos = 0;
        for (int k = 0; k < 4; ++k) {
            std::size_t next = line.find(',', pos);
            const std::string tok = line.substr(
                pos, next == std::string::npos ? std::string::npos : next - pos);
            try {
                c[k] = std::stod(tok);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ": malformed number in row " +
                                         std::to_string(row + 1));
            }
            if (k < 3) {
                if (next == std::string::npos)
                    throw std::runtime_error(path + ": short row " +
                                             std::to_string(row + 1));
                pos = next + 1;
            }
        }
        const cplx expect = d.node_flat(indices[row]);
        if (std::abs(cplx(c[0], c[1]) - expect) > coord_tol)
            throw std::runtime_error(path + ": node coordinates disagree with the domain at row " +
                                     std::to_string(row + 1));
        vals[indices[row]] = cplx(c[2], c[3]);
        ++row;
    }
    if (row != indices.size())
        throw std::runtime_error(path + ": fewer rows than domain nodes");
    return out;
}

}  // namespace beltrami
