#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "nlbd/errors.hpp"
#include "nlbd/summation.hpp"

namespace nlbd {

struct QuadResult {
    double value;
    double error;
};

namespace detail {

// Gauss 7 / Kronrod 15 pair (QUADPACK constants, positive half).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct QuadSegment {
    double a, b, value, error;
    bool operator<(const QuadSegment& o) const { return error < o.error; }
};

template <typename F>
QuadSegment gauss_kronrod_15(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(mid - half * kKronrodNodes[i]);
        fv[14 - i] = f(mid + half * kKronrodNodes[i]);
    }
    fv[7] = f(mid);
    double kron = kKronrodWeights[7] * fv[7];
    double gauss = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kron += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (fv[i] + fv[14 - i]);
    }
    kron *= half;
    gauss *= half;
    // QUADPACK-style rescaled error estimate, conservative for smooth f.
    double err = std::abs(kron - gauss);
    err = std::pow(200.0 * err, 1.5);
    double scale = std::abs(kron);
    if (scale > 0.0 && err > scale) err = scale;
    err = std::max(err, std::abs(kron - gauss));
    return {a, b, kron, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration over the segments defined by
// consecutive breakpoints. Interior nodes only, so integrable endpoint
// singularities are tolerated after a taming substitution by the caller.
template <typename F>
QuadResult integrate_adaptive(const F& f, const std::vector<double>& breakpoints,
                              double abs_tol, double rel_tol, int max_segments = 4000) {
    if (breakpoints.size() < 2) throw std::invalid_argument("integrate_adaptive: need an interval");
    std::vector<detail::QuadSegment> heap;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw std::invalid_argument("integrate_adaptive: breakpoints must increase");
        heap.push_back(detail::gauss_kronrod_15(f, breakpoints[i], breakpoints[i + 1]));
    }
    std::make_heap(heap.begin(), heap.end());
    auto totals = [&heap]() {
        NeumaierSum v, e;
        for (const auto& s : heap) {
            v.add(s.value);
            e.add(s.error);
        }
        return QuadResult{v.value(), e.value()};
    };
    QuadResult tot = totals();
    while (tot.error > std::max(abs_tol, rel_tol * std::abs(tot.value))) {
        if (static_cast<int>(heap.size()) >= max_segments)
            throw numerical_error("integrate_adaptive: segment budget exhausted, error " +
                                  std::to_string(tot.error));
        std::pop_heap(heap.begin(), heap.end());
        detail::QuadSegment worst = heap.back();
        heap.pop_back();
        double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {
            // Interval at rounding resolution; keep its estimate as is.
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        heap.push_back(detail::gauss_kronrod_15(f, worst.a, mid));
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(detail::gauss_kronrod_15(f, mid, worst.b));
        std::push_heap(heap.begin(), heap.end());
        tot = totals();
    }
    return tot;
}

template <typename F>
QuadResult integrate_adaptive(const F& f, double a, double b, double abs_tol, double rel_tol,
                              int max_segments = 4000) {
    return integrate_adaptive(f, std::vector<double>{a, b}, abs_tol, rel_tol, max_segments);
}

}  // namespace nlbd
