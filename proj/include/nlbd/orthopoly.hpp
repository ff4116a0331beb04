#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "nlbd/gammafn.hpp"

namespace nlbd {

// Degree cap for families with infinite support; finite families are capped
// at their upper state instead.
inline constexpr long kMaxPolyDegree = 64;

enum class PolyKind { Charlier, Meixner, Krawtchouk, Hahn };

// Discrete orthogonal polynomial family in the hypergeometric normalization
// (P_0 = 1). Evaluation runs the three-term recurrence in the degree index at
// fixed argument, which is forward-stable for these weights.
//
// Conventions:
//   Charlier    C_n(x; rho)        = 2F0(-n, -x; ; -1/rho)
//   Meixner     M_n(x; beta, rho)  = 2F1(-n, -x; beta; 1 - 1/rho)
//   Krawtchouk  K_n(x; p, N)       = 2F1(-n, -x; -N; 1/p)
//   Hahn        H_n(x; a, b, N)    = 3F2(-n, n+a+b+1, -x; a+1, -N; 1)
// The first three are self-dual: P_n(x) = P_x(n) on integer pairs. Hahn pairs
// with the dual Hahn polynomials R_x evaluated at n(n+a+b+1).
class PolynomialFamily {
public:
    static PolynomialFamily charlier(double rho) {
        if (!(rho > 0.0)) throw std::invalid_argument("charlier: rho must be positive");
        PolynomialFamily f(PolyKind::Charlier);
        f.rho_ = rho;
        return f;
    }

    static PolynomialFamily meixner(double rho, double beta) {
        if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("meixner: need 0 < rho < 1");
        if (!(beta > 0.0)) throw std::invalid_argument("meixner: beta must be positive");
        PolynomialFamily f(PolyKind::Meixner);
        f.rho_ = rho;
        f.beta_ = beta;
        return f;
    }

    static PolynomialFamily krawtchouk(long N, double p) {
        if (N < 1) throw std::invalid_argument("krawtchouk: N must be >= 1");
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("krawtchouk: need 0 < p < 1");
        PolynomialFamily f(PolyKind::Krawtchouk);
        f.N_ = N;
        f.p_ = p;
        return f;
    }

    static PolynomialFamily hahn(long alpha, long beta, long N) {
        if (N < 1) throw std::invalid_argument("hahn: N must be >= 1");
        if (alpha < 0 || beta < 0) throw std::invalid_argument("hahn: alpha, beta must be >= 0");
        PolynomialFamily f(PolyKind::Hahn);
        f.N_ = N;
        f.ha_ = static_cast<double>(alpha);
        f.hb_ = static_cast<double>(beta);
        return f;
    }

    PolyKind kind() const { return kind_; }
    bool finite_support() const {
        return kind_ == PolyKind::Krawtchouk || kind_ == PolyKind::Hahn;
    }
    long upper_state() const { return N_; }
    long max_degree() const { return finite_support() ? N_ : kMaxPolyDegree; }

    // Family parameters; meaningful only for the kinds that define them.
    double rho() const { return rho_; }
    double beta() const { return beta_; }
    double success_prob() const { return p_; }
    double hahn_alpha() const { return ha_; }
    double hahn_beta() const { return hb_; }

    // P_n(x), hypergeometric normalization. For the self-dual families the
    // degree recurrence is dominated once n far exceeds an integer argument
    // (errors grow along the factorial companion solution), so integer
    // arguments below the degree are evaluated through P_n(x) = P_x(n),
    // recursing in the smaller index.
    double eval_p(long n, double x) const {
        check_degree(n);
        if (kind_ != PolyKind::Hahn && x >= 0.0 && x < static_cast<double>(n) &&
            x == std::floor(x) && (!finite_support() || x <= static_cast<double>(N_)))
            return run_recurrence(static_cast<long>(x), static_cast<double>(n));
        return run_recurrence(n, x);
    }

    // Squared norm d_n^2 = sum_x P_n(x)^2 m(x) under the normalized weight,
    // closed form evaluated in log space.
    double norm_sq(long n) const {
        check_degree(n);
        return std::exp(log_norm_sq(n));
    }

    double norm(long n) const { return std::sqrt(norm_sq(n)); }

    // Orthonormal polynomial Q_n = P_n / d_n.
    double eval_q(long n, double x) const { return eval_p(n, x) / norm(n); }

    // Dual measure mass at n. Unlike polynomial evaluation the dual measure is
    // defined for every n in the dual state space, with no degree cap: tail
    // certificates sum it past the evaluation cutoff. log form avoids overflow
    // when pairing it with large polynomial values.
    double dual_mass(long n) const { return std::exp(log_dual_mass(n)); }

    double log_dual_mass(long n) const {
        if (n < 0) throw std::domain_error("dual_mass: index must be nonnegative");
        if (finite_support() && n > N_) throw std::domain_error("dual_mass: index exceeds N");
        return -log_norm_sq(n);
    }

private:
    double log_norm_sq(long n) const {
        switch (kind_) {
            case PolyKind::Charlier:
                return std::lgamma(n + 1.0) - n * std::log(rho_);
            case PolyKind::Meixner:
                return std::lgamma(n + 1.0) - log_pochhammer(beta_, n) - n * std::log(rho_);
            case PolyKind::Krawtchouk:
                return n * std::log((1.0 - p_) / p_) -
                       log_binomial(static_cast<double>(N_), static_cast<double>(n));
            case PolyKind::Hahn: {
                const double a = ha_, b = hb_, N = static_cast<double>(N_), nn = n;
                double log_h = (std::lgamma(nn + a + b + N + 2.0) - std::lgamma(nn + a + b + 1.0)) +
                               log_pochhammer(b + 1.0, n) + std::lgamma(nn + 1.0) +
                               std::lgamma(N - nn + 1.0) - std::log(2.0 * nn + a + b + 1.0) -
                               log_pochhammer(a + 1.0, n) - 2.0 * std::lgamma(N + 1.0);
                double log_total = std::lgamma(N + a + b + 2.0) - std::lgamma(N + 1.0) -
                                   std::lgamma(a + b + 2.0);
                return log_h - log_total;
            }
        }
        throw std::logic_error("log_norm_sq: unreachable");
    }

public:
    // Dual evaluation at integer pairs: P_x(n) for the self-dual families,
    // dual Hahn R_x(n(n+a+b+1)) for Hahn.
    double dual_eval(long x, long n) const {
        if (x < 0 || n < 0) throw std::domain_error("dual_eval: indices must be nonnegative");
        // Self-dual families: the dual function at state x is the degree-x
        // polynomial evaluated at n. x is a state, not a series index, so it
        // is not subject to the truncation cap. Recurse in the smaller index
        // for the same stability reason as eval_p.
        if (kind_ != PolyKind::Hahn) {
            if (finite_support() && (x > N_ || n > N_))
                throw std::domain_error("dual_eval: index exceeds N");
            if (n < x) return run_recurrence(n, static_cast<double>(x));
            return run_recurrence(x, static_cast<double>(n));
        }
        if (x > N_ || n > N_) throw std::domain_error("dual_eval: index exceeds N");
        const double a = ha_, b = hb_, N = static_cast<double>(N_);
        const double lam = static_cast<double>(n) * (n + a + b + 1.0);
        if (x == 0) return 1.0;
        double prev = 1.0;
        double cur = 1.0 - lam / (N * (a + 1.0));
        for (long k = 1; k < x; ++k) {
            const double A = (k - N) * (k + a + 1.0);
            const double C = k * (k - b - N - 1.0);
            double next = ((lam + A + C) * cur - C * prev) / A;
            prev = cur;
            cur = next;
        }
        return cur;
    }

    // Absolute defect of the duality relation at (n, x).
    double duality_defect(long n, long x) const {
        return std::abs(eval_p(n, static_cast<double>(x)) - dual_eval(x, n));
    }

    // Gershgorin upper bound on the zeros of the dual polynomial t -> P_x(t)
    // (degree x in the dual variable). For n above this bound, sign(P_x(n))
    // is constant. Infinite-support families only.
    double dual_root_bound(long x) const {
        if (finite_support())
            throw std::domain_error("dual_root_bound: finite families need no truncation");
        if (x < 0) throw std::domain_error("dual_root_bound: x must be nonnegative");
        if (x == 0) return -1.0;
        auto diag = [this](long k) {
            if (kind_ == PolyKind::Charlier) return k + rho_;
            return (k + (k + beta_) * rho_) / (1.0 - rho_);
        };
        auto offdiag = [this](long k) {
            if (kind_ == PolyKind::Charlier) return std::sqrt(k * rho_);
            return std::sqrt(k * (k + beta_ - 1.0) * rho_) / (1.0 - rho_);
        };
        double bound = 0.0;
        for (long k = 0; k < x; ++k) {
            double row = diag(k);
            if (k > 0) row += offdiag(k);
            if (k < x - 1) row += offdiag(k + 1);
            bound = std::max(bound, row);
        }
        return bound;
    }

private:
    explicit PolynomialFamily(PolyKind k) : kind_(k) {}

    void check_degree(long n) const {
        if (n < 0) throw std::domain_error("polynomial degree must be nonnegative");
        if (n > max_degree())
            throw std::domain_error("polynomial degree " + std::to_string(n) +
                                    " exceeds cap " + std::to_string(max_degree()));
    }

    double run_recurrence(long n, double x) const {
        if (n == 0) return 1.0;
        double prev = 1.0;
        double cur = first_degree(x);
        for (long k = 1; k < n; ++k) {
            double next = step(k, x, cur, prev);
            prev = cur;
            cur = next;
        }
        return cur;
    }

    double first_degree(double x) const {
        switch (kind_) {
            case PolyKind::Charlier:
                return 1.0 - x / rho_;
            case PolyKind::Meixner:
                return 1.0 + (rho_ - 1.0) * x / (rho_ * beta_);
            case PolyKind::Krawtchouk:
                return 1.0 - x / (p_ * N_);
            case PolyKind::Hahn:
                return 1.0 - x * (ha_ + hb_ + 2.0) / ((ha_ + 1.0) * N_);
        }
        throw std::logic_error("first_degree: unreachable");
    }

    // P_{k+1} from (P_k, P_{k-1}).
    double step(long k, double x, double pk, double pkm1) const {
        switch (kind_) {
            case PolyKind::Charlier:
                return ((k + rho_ - x) * pk - k * pkm1) / rho_;
            case PolyKind::Meixner:
                return (((rho_ - 1.0) * x + k + (k + beta_) * rho_) * pk - k * pkm1) /
                       (rho_ * (k + beta_));
            case PolyKind::Krawtchouk: {
                const double A = p_ * (N_ - k);
                const double C = k * (1.0 - p_);
                return ((A + C - x) * pk - C * pkm1) / A;
            }
            case PolyKind::Hahn: {
                const double a = ha_, b = hb_, N = static_cast<double>(N_);
                const double A = (k + a + b + 1.0) * (k + a + 1.0) * (N - k) /
                                 ((2.0 * k + a + b + 1.0) * (2.0 * k + a + b + 2.0));
                const double C = (k == 0) ? 0.0
                                          : k * (k + a + b + N + 1.0) * (k + b) /
                                                ((2.0 * k + a + b) * (2.0 * k + a + b + 1.0));
                return ((A + C - x) * pk - C * pkm1) / A;
            }
        }
        throw std::logic_error("step: unreachable");
    }

    PolyKind kind_;
    double rho_ = 0.0;   // Charlier, Meixner
    double beta_ = 0.0;  // Meixner
    double p_ = 0.0;     // Krawtchouk
    double ha_ = 0.0;    // Hahn alpha
    double hb_ = 0.0;    // Hahn beta
    long N_ = 0;         // finite families
};

}  // namespace nlbd
