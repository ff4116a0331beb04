#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlbd/bernstein.hpp"
#include "nlbd/errors.hpp"
#include "nlbd/gammafn.hpp"
#include "nlbd/laplace.hpp"
#include "nlbd/quadrature.hpp"
#include "nlbd/summation.hpp"

namespace nlbd {

namespace detail {

// Terminating criterion shared by the Mittag-Leffler power series and its
// derivative: ratio-driven terms, compensated accumulation.
template <class TermRatio>
double ml_series(double first_term, TermRatio&& ratio, int max_terms = 4000) {
    NeumaierSum sum;
    double term = first_term;
    sum.add(term);
    for (int k = 0; k < max_terms; ++k) {
        term *= ratio(k);
        sum.add(term);
        if (std::abs(term) <= 1e-18 * (std::abs(sum.value()) + 1e-300) && k > 2)
            return sum.value();
    }
    throw numerical_error("Mittag-Leffler series did not converge");
}

// Largest |z| (z < 0) the alternating power series can handle before
// cancellation eats the 1e-10 target: terms peak near exp(|z|^(1/alpha)).
inline double ml_series_limit(double alpha) { return 0.9 * std::pow(13.0, alpha); }

// Asymptotic expansion E_alpha(z) ~ -sum_{k>=1} z^{-k}/Gamma(1-alpha k) for
// z -> -infinity; returns false when the smallest term cannot certify the
// 1e-11 relative target and a contour evaluation is needed instead.
inline bool ml_asymptotic(double alpha, double z, bool deriv, double& out) {
    NeumaierSum sum;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 60; ++k) {
        const double coeff = reciprocal_gamma(1.0 - alpha * k);
        // 1/Gamma vanishes at the nonpositive-integer poles (alpha k integer);
        // those terms are structurally absent and say nothing about convergence.
        if (coeff == 0.0) continue;
        const double term = deriv ? k * std::pow(z, -k - 1.0) * coeff
                                  : -std::pow(z, -static_cast<double>(k)) * coeff;
        if (std::abs(term) >= best) {
            // terms stopped shrinking: accept iff the first omitted term is
            // below the relative target
            out = sum.value();
            return std::abs(term) <= 1e-11 * std::abs(out);
        }
        sum.add(term);
        best = std::abs(term);
        if (best <= 1e-13 * std::abs(sum.value())) {
            out = sum.value();
            return true;
        }
    }
    out = sum.value();
    return false;
}

// Branch-cut (spectral) representation on the negative axis, x = -z > 0:
//   E_alpha(-x)  = (sin(pi a)/(pi a)) Int_0^inf e^{-u^(1/a)} x / D(u) du
//   E'_alpha(-x) = -(sin(pi a)/(pi a)) Int_0^inf e^{-u^(1/a)} (u^2-x^2)/D(u)^2 du
// with D(u) = u^2 + 2 x u cos(pi a) + x^2. D has a Lorentzian dip near
// u = -x cos(pi a) when alpha > 1/2; breakpoints straddle it.
inline double ml_branch_cut(double alpha, double x, bool deriv) {
    const double c = std::cos(std::numbers::pi * alpha);
    const double s = std::sin(std::numbers::pi * alpha);
    const double scale = s / (std::numbers::pi * alpha);
    auto integrand = [=](double u) {
        const double D = (u + x * c) * (u + x * c) + (x * s) * (x * s);
        const double e = std::exp(-std::pow(u, 1.0 / alpha));
        if (deriv) return -scale * e * (u * u - x * x) / (D * D);
        return scale * e * x / D;
    };
    std::vector<double> pts{0.0};
    double upper = std::max(std::pow(44.0, alpha), 2.0 * x);
    if (c < 0.0) {
        const double peak = -x * c, width = x * s;
        if (peak - 5.0 * width > 0.0) pts.push_back(peak - 5.0 * width);
        pts.push_back(peak + 5.0 * width);
        upper = std::max(upper, peak + 40.0 * width);
    }
    pts.push_back(upper);
    return integrate_adaptive(integrand, pts, 1e-300, 1e-12).value;
}

}  // namespace detail

// E_alpha(z) = sum_k z^k / Gamma(alpha k + 1), alpha in (0, 1]. Relative
// accuracy ~1e-10 on the ranges the library exercises (z <= 0 and moderate
// z > 0). alpha = 1 reduces to exp.
inline double mittag_leffler(double alpha, double z) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::domain_error("mittag_leffler: alpha must lie in (0, 1]");
    if (alpha == 1.0) return std::exp(z);
    if (z == 0.0) return 1.0;
    if (z > 0.0 || -z <= detail::ml_series_limit(alpha)) {
        auto ratio = [=](int k) {
            return z * std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(alpha * k + alpha + 1.0));
        };
        return 1.0 + detail::ml_series(z * reciprocal_gamma(alpha + 1.0),
                                       [&](int k) { return ratio(k + 1); });
    }
    double out;
    if (detail::ml_asymptotic(alpha, z, false, out)) return out;
    return detail::ml_branch_cut(alpha, -z, false);
}

// E'_alpha(z) = sum_k k z^{k-1} / Gamma(alpha k + 1), same regime switching.
inline double mittag_leffler_deriv(double alpha, double z) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::domain_error("mittag_leffler_deriv: alpha must lie in (0, 1]");
    if (alpha == 1.0) return std::exp(z);
    if (z == 0.0) return reciprocal_gamma(alpha + 1.0);
    if (z > 0.0 || -z <= detail::ml_series_limit(alpha)) {
        auto ratio = [=](int k) {
            // term_k = k z^{k-1} / Gamma(alpha k + 1)
            return z * ((k + 1.0) / k) *
                   std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(alpha * k + alpha + 1.0));
        };
        return detail::ml_series(reciprocal_gamma(alpha + 1.0),
                                 [&](int k) { return ratio(k + 1); });
    }
    double out;
    if (detail::ml_asymptotic(alpha, z, true, out)) return out;
    return detail::ml_branch_cut(alpha, -z, true);
}

enum class EigenMethod { MittagLeffler, LaplaceInversion };

// Eigenfunctions e_Phi(t; lambda) = E[exp(lambda E_Phi(t))] of the non-local
// convolution derivative induced by a driftless Bernstein function: the unique
// solution of  d^Phi_t e = lambda e, e(0) = 1. Stable case is the
// Mittag-Leffler function E_alpha(lambda t^alpha); every family is also
// reachable through inversion of the transform Phi(eta)/(eta (Phi(eta)+|lambda|)).
class EigenEvaluator {
public:
    explicit EigenEvaluator(BernsteinFunction fn)
        : EigenEvaluator(fn, fn.kind() == BernsteinKind::Stable
                                 ? EigenMethod::MittagLeffler
                                 : EigenMethod::LaplaceInversion) {}

    EigenEvaluator(BernsteinFunction fn, EigenMethod method, double rel_tol = 0.0)
        : fn_(std::move(fn)), method_(method) {
        if (method_ == EigenMethod::MittagLeffler && fn_.kind() != BernsteinKind::Stable)
            throw std::domain_error("Mittag-Leffler evaluation applies to the stable family only");
        tol_ = rel_tol > 0.0 ? rel_tol
                             : (method_ == EigenMethod::MittagLeffler ? 1e-8 : 1e-6);
    }

    const BernsteinFunction& fn() const { return fn_; }
    EigenMethod method() const { return method_; }
    double tolerance() const { return tol_; }

    // e_Phi(t; lambda) for t >= 0, lambda <= 0.
    double eigenfunction(double t, double lambda) const {
        if (t < 0.0) throw std::domain_error("eigenfunction: t must be nonnegative");
        if (lambda > 0.0) throw std::domain_error("eigenfunction: lambda must be nonpositive");
        if (t == 0.0 || lambda == 0.0) return 1.0;
        if (method_ == EigenMethod::MittagLeffler)
            return mittag_leffler(fn_.alpha(), lambda * std::pow(t, fn_.alpha()));
        return invert_eigen(t, -lambda);
    }

    // d/dt e_Phi(t; lambda). Analytic in the stable case; otherwise inverted
    // from the exact transform  eta ehat(eta) - 1 = -|lambda|/(Phi(eta)+|lambda|),
    // which stays relatively accurate down to arbitrarily small t (central
    // differencing of e_Phi drowns in inversion round-off there).
    double eigenfunction_deriv(double t, double lambda) const {
        if (!(t > 0.0)) throw std::domain_error("eigenfunction_deriv: t must be positive");
        if (lambda > 0.0) throw std::domain_error("eigenfunction_deriv: lambda <= 0 required");
        if (lambda == 0.0) return 0.0;
        if (method_ == EigenMethod::MittagLeffler) {
            const double a = fn_.alpha();
            return lambda * a * std::pow(t, a - 1.0) *
                   mittag_leffler_deriv(a, lambda * std::pow(t, a));
        }
        const double lam = -lambda;
        return lambda * talbot_invert(
                            [this, lam](std::complex<double> s) {
                                return 1.0 / (fn_.phi(s) + lam);
                            },
                            t, 32);
    }

    // | Int_0^t e'(tau) nu_bar(t - tau) dtau  -  lambda e(t) | : how well the
    // evaluated eigenfunction satisfies its defining non-local equation. The
    // endpoint singularities (e' at 0, nu_bar at t) are flattened by
    // substitutions chosen per family.
    double conv_derivative_residual(double t, double lambda) const {
        if (!(t > 0.0)) throw std::domain_error("conv_derivative_residual: t must be positive");
        if (!(lambda < 0.0))
            throw std::domain_error("conv_derivative_residual: lambda must be negative");
        const double half = 0.5 * t;
        NeumaierSum total;

        // left piece: tau in (0, t/2], derivative singularity
        if (log_type()) {
            // U(tau) decays only like 1/log(1/tau) here, so map tau = e^{-1/v}
            // and account for the truncated [0, tau_f] sliver in closed form:
            // its integral is lambda U(tau_f) nu_bar(t) + O(U^2).
            const double delta = std::min(half, 0.25);
            const double tau_f = std::exp(-125.0);
            total.add(lambda * fn_.potential(tau_f) * fn_.levy_tail(t));
            const double v_lo = 1.0 / 125.0, v_hi = -1.0 / std::log(delta);
            auto left = [&](double v) {
                const double tau = std::exp(-1.0 / v);
                return eigenfunction_deriv(tau, lambda) * fn_.levy_tail(t - tau) * tau / (v * v);
            };
            total.add(integrate_adaptive(left, {v_lo, v_hi}, 1e-6, 1e-7).value);
            if (delta < half) {
                auto mid = [&](double tau) {
                    return eigenfunction_deriv(tau, lambda) * fn_.levy_tail(t - tau);
                };
                total.add(integrate_adaptive(mid, {delta, half}, 1e-6, 1e-7).value);
            }
        } else {
            const double p = 1.0 / fn_.alpha();
            auto left = [&](double w) {
                const double tau = std::pow(w, p);
                return eigenfunction_deriv(tau, lambda) * fn_.levy_tail(t - tau) * p *
                       std::pow(w, p - 1.0);
            };
            total.add(integrate_adaptive(left, {0.0, std::pow(half, 1.0 / p)}, 1e-6, 1e-7).value);
        }

        // right piece: s = t - tau in (0, t/2], Levy-tail singularity
        const double q = log_type() ? 2.0 : 1.0 / (1.0 - fn_.alpha());
        auto right = [&](double w) {
            const double s = std::pow(w, q);
            return eigenfunction_deriv(t - s, lambda) * fn_.levy_tail(s) * q *
                   std::pow(w, q - 1.0);
        };
        total.add(integrate_adaptive(right, {0.0, std::pow(half, 1.0 / q)}, 1e-6, 1e-7).value);

        return std::abs(total.value() - lambda * eigenfunction(t, lambda));
    }

    // Certified envelope K(t) with lambda e_Phi(t; -lambda) <= K(t) for all
    // lambda >= 0: the limit as lambda -> infinity is nu_bar(t), and the
    // approach is scanned on a log grid.
    double uniform_bound(double t) const {
        if (!(t > 0.0)) throw std::domain_error("uniform_bound: t must be positive");
        double best = fn_.levy_tail(t);
        const double step = std::pow(10.0, 1.0 / 12.0);
        for (double lam = 1e-4; lam <= 1.0000001e7; lam *= step)
            best = std::max(best, lam * eigenfunction(t, -lam));
        return best;
    }

private:
    bool log_type() const {
        // families whose Phi grows logarithmically: potential decays like
        // 1/log(1/t) near zero instead of a power
        return fn_.kind() == BernsteinKind::GeometricStable ||
               fn_.kind() == BernsteinKind::Gamma || fn_.kind() == BernsteinKind::Custom;
    }

    double invert_eigen(double t, double lam) const {
        auto F = [this, lam](std::complex<double> s) { return fn_.eigen_laplace(lam, s); };
        const double v = talbot_invert(F, t, 32);
        const double check = talbot_invert(F, t, 24);
        const double est = std::abs(v - check);
        if (est > std::max(1e-9, tol_ * std::abs(v)))
            throw numerical_error("eigenfunction inversion achieved error estimate " +
                                  std::to_string(est) + " above tolerance");
        if (v <= 0.0) return std::max(est, 1e-300);
        return std::min(v, 1.0);
    }

    BernsteinFunction fn_;
    EigenMethod method_;
    double tol_;
};

}  // namespace nlbd
