#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "beltrami/grid.hpp"

namespace beltrami {

// Deterministic sample source. Doubles are derived from raw engine words so
// sequences are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Uniform w.r.t. area.
    cplx in_disk(cplx c, double radius) {
        const double r = radius * std::sqrt(uniform());
        const double t = 2.0 * std::numbers::pi * uniform();
        return c + cplx(r * std::cos(t), r * std::sin(t));
    }

    cplx unit() {
        const double t = 2.0 * std::numbers::pi * uniform();
        return cplx(std::cos(t), std::sin(t));
    }

private:
    std::mt19937_64 eng_;
};

// Smooth random field: low-order polynomial in z and conj(z), coefficients
// drawn from the unit disk and damped by total degree.
inline ComplexField random_bandlimited(DomainPtr dom, Rng& rng,
                                       int max_degree = 3) {
    struct Term {
        int p, q;
        cplx c;
    };
    std::vector<Term> terms;
    for (int p = 0; p <= max_degree; ++p)
        for (int q = 0; q + p <= max_degree; ++q)
            terms.push_back({p, q, rng.in_disk(0.0, 1.0) / (1.0 + p + q)});
    return ComplexField::sample(dom, [&](cplx z) {
        cplx v(0.0, 0.0);
        for (const Term& t : terms) {
            cplx m = t.c;
            for (int i = 0; i < t.p; ++i) m *= z;
            for (int i = 0; i < t.q; ++i) m *= std::conj(z);
            v += m;
        }
        return v;
    });
}

}  // namespace beltrami
