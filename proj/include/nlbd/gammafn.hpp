#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlbd {

// 1/Gamma(x), returning 0 at the poles x = 0, -1, -2, ...
inline double reciprocal_gamma(double x) {
    if (x == std::floor(x) && x <= 0.0) return 0.0;
    return 1.0 / std::tgamma(x);
}

// log (a)_n for a > 0, n >= 0.
inline double log_pochhammer(double a, long n) {
    return std::lgamma(a + static_cast<double>(n)) - std::lgamma(a);
}

inline double log_binomial(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Exponential integral E1(x) = Gamma(0, x), x > 0.
inline double expint_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("expint_e1: argument must be positive");
    if (x <= 1.0) {
        // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
        constexpr double euler = 0.57721566490153286060651209008240243;
        double sum = 0.0;
        double term = 1.0;
        for (int k = 1; k < 64; ++k) {
            term *= -x / k;
            double add = -term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return sum - euler - std::log(x);
    }
    // Continued fraction for Gamma(0, x), modified Lentz.
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 400; ++i) {
        double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x) * h;
}

namespace detail {

// Lower incomplete gamma by series, s > 0, x < s + 1.
inline double lower_gamma_series(double s, double x) {
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + s * std::log(x));
}

// Upper incomplete gamma by continued fraction, s <= x + 1 region.
inline double upper_gamma_cf(double s, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + s * std::log(x)) * h;
}

}  // namespace detail

// Upper incomplete gamma Gamma(s, x) for s in (-1, 1], x > 0.
// Negative orders use the downward recurrence
// Gamma(s, x) = (Gamma(s+1, x) - x^s e^{-x}) / s.
inline double upper_gamma(double s, double x) {
    if (!(x > 0.0)) throw std::domain_error("upper_gamma: x must be positive");
    if (!(s > -1.0) || !(s <= 1.0)) throw std::domain_error("upper_gamma: order outside (-1, 1]");
    if (s == 0.0) return expint_e1(x);
    if (s < 0.0) {
        double g1 = upper_gamma(s + 1.0, x);
        return (g1 - std::exp(s * std::log(x) - x)) / s;
    }
    if (x < s + 1.0) return std::tgamma(s) - detail::lower_gamma_series(s, x);
    return detail::upper_gamma_cf(s, x);
}

}  // namespace nlbd
