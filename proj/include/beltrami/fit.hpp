#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace beltrami {

struct LineFit {
    double slope;
    double intercept;
    double r_squared;
};

// Ordinary least squares y = slope * x + intercept.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("need at least two points to fit a line");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("degenerate abscissae in fit");
    LineFit f{sxy / sxx, 0.0, 1.0};
    f.intercept = my - f.slope * mx;
    if (syy > 0.0) {
        double ssres = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - (f.slope * x[i] + f.intercept);
            ssres += e * e;
        }
        f.r_squared = 1.0 - ssres / syy;
    }
    return f;
}

}  // namespace beltrami
