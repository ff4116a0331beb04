#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace nlbd {

// Node count giving roughly 10^{-0.6 M} truncation error for the fixed Talbot
// rule, clamped so the e^{0.4 M} round-off amplification stays below ~1e-10.
inline int talbot_nodes(double tol) {
    int m = static_cast<int>(std::ceil(-2.0 * std::log10(tol))) + 10;
    return std::clamp(m, 18, 36);
}

// Fixed-Talbot inversion of a Laplace transform (Abate-Valko contour).
// Requires F analytic on the complex plane cut along the negative real axis;
// singularities on the cut (branch points, real poles) are enclosed.
inline double talbot_invert(const std::function<std::complex<double>(std::complex<double>)>& F,
                            double t, int nodes = 32) {
    if (!(t > 0.0)) throw std::domain_error("talbot_invert: t must be positive");
    const double r = 2.0 * nodes / (5.0 * t);
    double sum = 0.5 * std::exp(r * t) * F(std::complex<double>(r, 0.0)).real();
    for (int k = 1; k < nodes; ++k) {
        const double theta = k * std::numbers::pi / nodes;
        const double cot = std::cos(theta) / std::sin(theta);
        const std::complex<double> s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const std::complex<double> term =
            std::exp(s * t) * F(s) * std::complex<double>(1.0, sigma);
        sum += term.real();
    }
    return sum * r / nodes;
}

}  // namespace nlbd
