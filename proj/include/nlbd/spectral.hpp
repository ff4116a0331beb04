#pragma once

// Truncated eigen-series for the fundamental solution p(t,x;y) and for strong
// solutions of the non-local backward and forward Cauchy problems. Every
// returned value carries a certified bound on the dropped remainder; nothing
// is clamped or smoothed here.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlbd/bdprocess.hpp"
#include "nlbd/eigenfn.hpp"
#include "nlbd/errors.hpp"
#include "nlbd/summation.hpp"

namespace nlbd {

enum class ProjectionWeight { Plain, DividedByM };
enum class SolutionKind { Backward, Forward, Fundamental };

// One evaluation of a truncated eigen-series.
struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;  // certified bound on everything dropped
    long truncation = 0;      // highest retained mode index
};

// Datum expanded in the orthonormal eigenbasis.
struct Projection {
    std::vector<double> coefficients;  // h_n for n = 0..cap
    double datum_norm_sq = 0.0;        // ||h||^2 (plain) or ||h/m||^2 (divided)
    double parseval_defect = 0.0;      // ||.||^2 - sum h_n^2, clamped at 0
};

namespace detail {

// Fixed-association pairwise reduction. The summation tree depends only on
// the term count, so the result is bit-identical regardless of how the terms
// were produced or scheduled.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return v[0];
    if (n == 2) return v[0] + v[1];
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

// sum_{n > start} |Q_n(x) Q_n(y)| for the infinite-support families. By
// self-duality the summand is |P_x(n) P_y(n)| mdual(n), evaluated in log
// space so that enormous polynomial values against a factorially small dual
// measure never overflow. Certification of the remainder: every zero of the
// dual polynomial t -> P_x(t) lies below the Gershgorin bound B, so for
// n > B the factor |P_x(n+1)/P_x(n)| is at most exp(x/(n-B)); together with
// a monotone bound on the dual-measure ratio the per-step growth factor is
// rbar below, and once rbar < r_lim the tail past n is dominated by the
// geometric series q(n) rbar/(1-rbar).
inline double dual_tail_abs(const PolynomialFamily& poly, long x, long y, long start) {
    if (poly.finite_support()) return 0.0;
    const bool charlier = poly.kind() == PolyKind::Charlier;
    const double rho = poly.rho();
    const double beta = poly.beta();
    // Meixner measure ratios approach rho from either side, so a fixed 0.9
    // acceptance would be unreachable for rho near 1; use the midpoint.
    const double r_lim = charlier ? 0.9 : 0.5 * (1.0 + rho);
    const double B = std::max(poly.dual_root_bound(x), poly.dual_root_bound(y));
    NeumaierSum acc;
    const long budget = start + 1000000;
    for (long n = start + 1; n <= budget; ++n) {
        const double lq = std::log(std::abs(poly.dual_eval(x, n))) +
                          std::log(std::abs(poly.dual_eval(y, n))) + poly.log_dual_mass(n);
        const double q = std::exp(lq);  // underflow to 0 is harmless
        acc.add(q);
        if (n > B + 1.0) {
            const double mrat = charlier ? rho / (n + 1.0)
                                         : rho * std::max(1.0, (beta + n) / (n + 1.0));
            const double rbar = std::exp(static_cast<double>(x + y) / (n - B)) * mrat;
            if (rbar < r_lim) {
                const double rem = q * rbar / (1.0 - rbar);
                if (rem <= 1e-6 * acc.value() + 1e-280) return acc.value() + rem;
            }
        }
    }
    throw numerical_error("dual tail certificate did not converge within budget");
}

}  // namespace detail

// Expand a datum over the state space in the orthonormal eigenbasis.
// Plain weight:        h_n = sum_x h(x) Q_n(x) m(x)
// Divided-by-m weight: h_n = sum_x h(x) Q_n(x)   (projection of h/m in l2(m))
//
// For an infinite state space the x-range is extended until 25 consecutive
// norm increments fall below 1e-26 of the running total and the range covers
// the cached measure table with margin; a datum whose partial sums are still
// moving at the hard budget is rejected as not being in l2(m). A Parseval
// defect above 1e-8 of the norm means the datum has content beyond the series
// cap and cannot be represented faithfully; that is an error, not a warning.
inline Projection project(const BirthDeathSpec& spec, const std::function<double(long)>& h,
                          ProjectionWeight weight) {
    const PolynomialFamily& poly = spec.poly();
    const long cap = poly.max_degree();

    auto norm_increment = [&](double hx, double m) {
        if (weight == ProjectionWeight::Plain) return hx * hx * m;
        if (hx == 0.0) return 0.0;
        if (m < 1e-290)
            throw numerical_error(
                "datum carries mass where the invariant measure underflows; "
                "the l2(m) check for h/m cannot be certified");
        return hx * hx / m;
    };

    std::vector<double> hv;
    NeumaierSum norm_acc;
    long x_hi;
    if (spec.finite_state()) {
        x_hi = spec.upper_state();
        hv.reserve(static_cast<std::size_t>(x_hi) + 1);
        for (long x = 0; x <= x_hi; ++x) {
            hv.push_back(h(x));
            norm_acc.add(norm_increment(hv.back(), spec.invariant_mass(x)));
        }
    } else {
        const long table = static_cast<long>(spec.mass_table().size());
        long quiet = 0;
        long x = 0;
        for (;; ++x) {
            if (x > 20000)
                throw numerical_error(
                    "datum norm did not stabilize within the state budget; datum not in l2(m)");
            hv.push_back(h(x));
            const double inc = norm_increment(hv.back(), spec.invariant_mass(x));
            norm_acc.add(inc);
            quiet = (inc <= 1e-26 * norm_acc.value()) ? quiet + 1 : 0;
            if (quiet >= 25 && x >= table + 25) break;
        }
        x_hi = x;
    }
    const double norm_sq = norm_acc.value();

    // Coefficient inner products, one compensated accumulator per mode.
    std::vector<double> inv_norm(static_cast<std::size_t>(cap) + 1);
    for (long n = 0; n <= cap; ++n)
        inv_norm[static_cast<std::size_t>(n)] = 1.0 / poly.norm(n);
    std::vector<NeumaierSum> sums(static_cast<std::size_t>(cap) + 1);
    std::vector<double> abs_sums(static_cast<std::size_t>(cap) + 1, 0.0);
    for (long x = 0; x <= x_hi; ++x) {
        const double hx = hv[static_cast<std::size_t>(x)];
        if (hx == 0.0) continue;
        const double w =
            weight == ProjectionWeight::Plain ? hx * spec.invariant_mass(x) : hx;
        for (long n = 0; n <= cap; ++n) {
            const double term =
                w * poly.eval_p(n, static_cast<double>(x)) * inv_norm[static_cast<std::size_t>(n)];
            sums[static_cast<std::size_t>(n)].add(term);
            abs_sums[static_cast<std::size_t>(n)] += std::abs(term);
        }
    }

    Projection out;
    out.coefficients.resize(static_cast<std::size_t>(cap) + 1);
    NeumaierSum coef_sq;
    double resolution_sq = 0.0;
    for (long n = 0; n <= cap; ++n) {
        double c = sums[static_cast<std::size_t>(n)].value();
        // a coefficient below the quadrature's roundoff resolution is
        // indistinguishable from zero; keeping it would inject noise that the
        // high modes amplify enormously at large states
        const double resolution = 8.0 * std::numeric_limits<double>::epsilon() *
                                  abs_sums[static_cast<std::size_t>(n)];
        if (std::abs(c) <= resolution) {
            c = 0.0;
            resolution_sq += resolution * resolution;
        }
        out.coefficients[static_cast<std::size_t>(n)] = c;
        coef_sq.add(c * c);
    }
    out.datum_norm_sq = norm_sq;
    out.parseval_defect = std::max(resolution_sq, norm_sq - coef_sq.value());
    if (out.parseval_defect > 1e-8 * norm_sq)
        throw numerical_error("Parseval defect " + std::to_string(out.parseval_defect) +
                              " exceeds tolerance; datum has content beyond the series cap");
    return out;
}

// A solved Cauchy problem, held as eigen-coefficients plus the machinery to
// evaluate the series at any (t, state) with a certified truncation bound.
class SpectralSolution {
public:
    static SpectralSolution backward(const BirthDeathSpec& spec, EigenEvaluator ev,
                                     const std::function<double(long)>& g, double tol = 1e-8) {
        Projection pr = project(spec, g, ProjectionWeight::Plain);
        return SpectralSolution(spec, std::move(ev), std::move(pr), SolutionKind::Backward, tol,
                                -1);
    }

    static SpectralSolution forward(const BirthDeathSpec& spec, EigenEvaluator ev,
                                    const std::function<double(long)>& f, double tol = 1e-8) {
        Projection pr = project(spec, f, ProjectionWeight::DividedByM);
        return SpectralSolution(spec, std::move(ev), std::move(pr), SolutionKind::Forward, tol,
                                -1);
    }

    // Transition kernel column p(t, .; source): the forward solution for the
    // point datum at source. Coefficients Q_n(source) are exact, so the
    // beyond-cap remainder is certified directly from the dual tail instead
    // of through a Cauchy-Schwarz defect bound.
    static SpectralSolution fundamental(const BirthDeathSpec& spec, EigenEvaluator ev,
                                        long source, double tol = 1e-8) {
        if (!spec.in_state_space(source))
            throw std::domain_error("fundamental: source state outside the state space");
        const PolynomialFamily& poly = spec.poly();
        const long cap = poly.max_degree();
        Projection pr;
        pr.coefficients.resize(static_cast<std::size_t>(cap) + 1);
        for (long n = 0; n <= cap; ++n)
            pr.coefficients[static_cast<std::size_t>(n)] =
                poly.eval_q(n, static_cast<double>(source));
        const double m = spec.invariant_mass(source);
        pr.datum_norm_sq = m > 0.0 ? 1.0 / m : std::numeric_limits<double>::infinity();
        pr.parseval_defect = 0.0;
        return SpectralSolution(spec, std::move(ev), std::move(pr), SolutionKind::Fundamental,
                                tol, source);
    }

    SolutionKind kind() const { return kind_; }
    const BirthDeathSpec& process() const { return spec_; }
    const EigenEvaluator& evaluator() const { return ev_; }
    const std::vector<double>& coefficients() const { return coeff_; }
    double tolerance() const { return tol_; }
    double datum_norm_sq() const { return datum_norm_sq_; }
    double parseval_defect() const { return defect_; }

    // Highest stored mode and the l2(m) size of every coefficient beyond it.
    long truncation() const { return static_cast<long>(coeff_.size()) - 1; }
    double tail_bound() const { return cap_tail_bound_; }

    // Series value at (t, point) truncated at the smallest mode count whose
    // certified remainder meets the tolerance. The remainder combines the
    // in-cap suffix with the beyond-cap bound, both scaled by the largest
    // dropped eigenfunction value e(t; lambda_{N+1}).
    SeriesValue evaluate(double t, long point) const {
        if (t < 0.0) throw std::domain_error("evaluate: t must be nonnegative");
        if (!spec_.in_state_space(point))
            throw std::domain_error("evaluate: state outside the state space");
        const PolynomialFamily& poly = spec_.poly();
        const long cap = truncation();
        const double mpt = kind_ == SolutionKind::Backward ? 1.0 : spec_.invariant_mass(point);

        std::vector<double> cq(static_cast<std::size_t>(cap) + 1);
        for (long n = 0; n <= cap; ++n)
            cq[static_cast<std::size_t>(n)] =
                coeff_[static_cast<std::size_t>(n)] * poly.eval_q(n, static_cast<double>(point));

        if (spec_.finite_state()) {
            std::vector<double> terms(static_cast<std::size_t>(cap) + 1);
            for (long n = 0; n <= cap; ++n)
                terms[static_cast<std::size_t>(n)] =
                    ev_.eigenfunction(t, spec_.eigenvalue(n)) * cq[static_cast<std::size_t>(n)];
            return {detail::pairwise_sum(terms) * mpt, 0.0, cap};
        }

        // suffix_abs[N] = sum_{n=N+1..cap} |c_n Q_n(point)|
        std::vector<double> suffix_abs(static_cast<std::size_t>(cap) + 1, 0.0);
        for (long n = cap - 1; n >= 0; --n)
            suffix_abs[static_cast<std::size_t>(n)] =
                suffix_abs[static_cast<std::size_t>(n) + 1] +
                std::abs(cq[static_cast<std::size_t>(n) + 1]);
        const double beyond = beyond_cap(point);

        long keep = -1;
        double bound = 0.0;
        for (long N = 0; N <= cap; ++N) {
            const double drop = suffix_abs[static_cast<std::size_t>(N)] + beyond;
            bound = ev_.eigenfunction(t, spec_.eigenvalue(N + 1)) * drop * mpt;
            if (bound <= tol_) {
                keep = N;
                break;
            }
        }
        if (keep < 0)
            throw numerical_error("series cap cannot certify the requested tolerance; "
                                  "achieved bound " + std::to_string(bound));

        std::vector<double> terms(static_cast<std::size_t>(keep) + 1);
        for (long n = 0; n <= keep; ++n)
            terms[static_cast<std::size_t>(n)] =
                ev_.eigenfunction(t, spec_.eigenvalue(n)) * cq[static_cast<std::size_t>(n)];
        return {detail::pairwise_sum(terms) * mpt, bound, keep};
    }

    double operator()(double t, long point) const { return evaluate(t, point).value; }

private:
    SpectralSolution(const BirthDeathSpec& spec, EigenEvaluator ev, Projection pr,
                     SolutionKind kind, double tol, long source)
        : spec_(spec),
          ev_(std::move(ev)),
          coeff_(std::move(pr.coefficients)),
          datum_norm_sq_(pr.datum_norm_sq),
          defect_(pr.parseval_defect),
          kind_(kind),
          tol_(tol),
          source_(source) {
        if (!(tol_ > 0.0)) throw std::domain_error("solution tolerance must be positive");
        if (spec_.finite_state()) {
            cap_tail_bound_ = 0.0;
        } else if (kind_ == SolutionKind::Fundamental) {
            cap_tail_bound_ =
                std::sqrt(detail::dual_tail_abs(spec_.poly(), source_, source_, truncation()));
        } else {
            cap_tail_bound_ = std::sqrt(defect_);
        }
    }

    // Bound on sum_{n > cap} |c_n Q_n(point)|. Fundamental solutions know
    // their beyond-cap coefficients exactly; projected data are bounded via
    // Cauchy-Schwarz against the Parseval defect.
    double beyond_cap(long point) const {
        auto it = beyond_.find(point);
        if (it != beyond_.end()) return it->second;
        double b;
        if (kind_ == SolutionKind::Fundamental) {
            b = detail::dual_tail_abs(spec_.poly(), point, source_, truncation());
        } else {
            b = std::sqrt(defect_) *
                std::sqrt(detail::dual_tail_abs(spec_.poly(), point, point, truncation()));
        }
        beyond_.emplace(point, b);
        return b;
    }

    BirthDeathSpec spec_;
    EigenEvaluator ev_;
    std::vector<double> coeff_;
    double datum_norm_sq_;
    double defect_;
    SolutionKind kind_;
    double tol_;
    long source_;  // point-datum state for Fundamental, -1 otherwise
    double cap_tail_bound_ = 0.0;
    mutable std::map<long, double> beyond_;  // per-point beyond-cap bounds
};

// Convenience single-point entry points.

inline SeriesValue fundamental(const BirthDeathSpec& spec, const EigenEvaluator& ev, double t,
                               long x, long y, double tol = 1e-8) {
    return SpectralSolution::fundamental(spec, ev, y, tol).evaluate(t, x);
}

inline SeriesValue solve_backward(const BirthDeathSpec& spec, const EigenEvaluator& ev,
                                  const std::function<double(long)>& g, double t, long y,
                                  double tol = 1e-8) {
    return SpectralSolution::backward(spec, ev, g, tol).evaluate(t, y);
}

inline SeriesValue solve_forward(const BirthDeathSpec& spec, const EigenEvaluator& ev,
                                 const std::function<double(long)>& f, double t, long x,
                                 double tol = 1e-8) {
    return SpectralSolution::forward(spec, ev, f, tol).evaluate(t, x);
}

}  // namespace nlbd
