#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlbd/errors.hpp"
#include "nlbd/orthopoly.hpp"
#include "nlbd/summation.hpp"

namespace nlbd {

enum class ProcessClass { FiniteState, ImmigrationDeath, Meixner };

// Solvable birth-death process on E = {0..N} or E = N0: birth rate b(x) and
// death rate d(x) are polynomials with deg d <= 2 and deg(b - d) <= 1, the
// invariant measure m solves the discrete Pearson equation
//     d(x+1) m(x+1) = b(x) m(x),
// and the generator has polynomial eigenfunctions (the matching orthogonal
// family) with eigenvalues
//     lambda_n = n (b1 - d1) + n (n - 1) d2 <= 0.
class BirthDeathSpec {
public:
    static BirthDeathSpec immigration_death(double b, double d) {
        require(b > 0.0 && d > 0.0, "immigration-death: need b > 0 and d > 0");
        BirthDeathSpec s(ProcessClass::ImmigrationDeath, PolynomialFamily::charlier(b / d));
        s.bcoef_ = {b, 0.0, 0.0};
        s.dcoef_ = {0.0, d, 0.0};
        s.finish();
        return s;
    }

    static BirthDeathSpec meixner(double b, double d, double beta) {
        require(b > 0.0 && d > 0.0 && beta > 0.0, "meixner: need b, d, beta > 0");
        require(b < d, "meixner: need b < d for positive recurrence");
        BirthDeathSpec s(ProcessClass::Meixner, PolynomialFamily::meixner(b / d, beta));
        s.bcoef_ = {beta * b, b, 0.0};
        s.dcoef_ = {0.0, d, 0.0};
        s.finish();
        return s;
    }

    static BirthDeathSpec krawtchouk(long N, double b, double d) {
        require(N >= 1, "krawtchouk: need N >= 1");
        require(b > 0.0 && d > 0.0, "krawtchouk: need b > 0 and d > 0");
        BirthDeathSpec s(ProcessClass::FiniteState,
                         PolynomialFamily::krawtchouk(N, b / (b + d)));
        s.N_ = N;
        s.bcoef_ = {b * N, -b, 0.0};
        s.dcoef_ = {0.0, d, 0.0};
        s.finish();
        return s;
    }

    static BirthDeathSpec hahn(long N, long alpha, long beta, double d) {
        require(N >= 1, "hahn: need N >= 1");
        require(alpha >= 0 && beta >= 0, "hahn: need alpha, beta >= 0");
        require(d > 0.0, "hahn: need d > 0");
        BirthDeathSpec s(ProcessClass::FiniteState, PolynomialFamily::hahn(alpha, beta, N));
        s.N_ = N;
        const double a = static_cast<double>(alpha), bb = static_cast<double>(beta);
        s.bcoef_ = {d * N * (a + 1.0), d * (N - 1.0 - a), -d};
        s.dcoef_ = {0.0, d * (N + bb + 1.0), -d};
        s.finish();
        return s;
    }

    // Build a spec from raw polynomial rate coefficients (ascending powers),
    // validating solvability and matching a built-in family.
    static BirthDeathSpec from_rates(const std::vector<double>& b, const std::vector<double>& d) {
        auto coef = [](const std::vector<double>& v, std::size_t i) {
            return i < v.size() ? v[i] : 0.0;
        };
        require(b.size() <= 3 && d.size() <= 3, "rates: polynomial degree at most 2");
        const double b0 = coef(b, 0), b1 = coef(b, 1), b2 = coef(b, 2);
        const double d0 = coef(d, 0), d1 = coef(d, 1), d2 = coef(d, 2);
        require(d0 == 0.0, "rates: d(0) must vanish");
        require(b2 == d2, "rates: deg(b - d) <= 1 requires matching quadratic terms");
        require(d1 > 0.0 || d2 != 0.0, "rates: death rate must be nonzero");
        if (b2 != 0.0) {
            // Quadratic case: b(x) = d (N - x)(x + alpha + 1), d(x) = d x (N + beta + 1 - x).
            const double rate = -d2;
            require(rate > 0.0, "rates: quadratic terms must be negative");
            const double delta = b1 / rate;            // N - (alpha + 1)
            const double prod = b0 / rate;             // N (alpha + 1)
            const double disc = delta * delta + 4.0 * prod;
            require(disc >= 0.0, "rates: no real Hahn factorization");
            const double ap1 = 0.5 * (-delta + std::sqrt(disc));
            const double Nr = ap1 + delta;
            const double br = d1 / rate - 1.0 - Nr;
            long N = std::lround(Nr), alpha = std::lround(ap1 - 1.0), beta = std::lround(br);
            require(near_integer(Nr) && near_integer(ap1 - 1.0) && near_integer(br),
                    "rates: Hahn parameters must be integers");
            require(N >= 1 && alpha >= 0 && beta >= 0, "rates: Hahn parameters out of range");
            return hahn(N, alpha, beta, rate);
        }
        require(d1 > 0.0, "rates: need d(x) = d x with d > 0");
        if (b1 == 0.0) {
            require(b0 > 0.0, "rates: constant birth rate must be positive");
            return immigration_death(b0, d1);
        }
        if (b1 > 0.0) {
            require(b1 < d1, "rates: limit ratio b1/d1 must be < 1 on infinite state space");
            return meixner(b1, d1, b0 / b1);
        }
        const double Nr = b0 / (-b1);
        require(near_integer(Nr) && Nr >= 1.0, "rates: finite state space needs integer N >= 1");
        return krawtchouk(std::lround(Nr), -b1, d1);
    }

    ProcessClass process_class() const { return class_; }
    const PolynomialFamily& poly() const { return poly_; }
    bool finite_state() const { return N_ >= 0; }
    long upper_state() const { return N_; }

    bool in_state_space(long x) const { return x >= 0 && (N_ < 0 || x <= N_); }

    double birth(long x) const { return horner(bcoef_, x); }
    double death(long x) const { return horner(dcoef_, x); }

    double eigenvalue(long n) const {
        if (n < 0 || (N_ >= 0 && n > N_))
            throw std::domain_error("eigenvalue: index outside spectral range");
        const double nn = static_cast<double>(n);
        return nn * (bcoef_[1] - dcoef_[1]) + nn * (nn - 1.0) * dcoef_[2];
    }

    // Generator G f(x) = b(x)(f(x+1) - f(x)) - d(x)(f(x) - f(x-1)), equal to
    // (b - d) grad+ f + d Laplacian f. Rates vanish at the boundary, so the
    // out-of-range neighbor is never evaluated.
    template <class F>
    double apply_generator(F&& f, long x) const {
        check_state(x);
        const double fx = f(x);
        double out = 0.0;
        if (const double bx = birth(x); bx != 0.0) out += bx * (f(x + 1) - fx);
        if (const double dx = death(x); dx != 0.0) out -= dx * (fx - f(x - 1));
        return out;
    }

    // Forward operator L f(x) = b(x-1) f(x-1) + d(x+1) f(x+1) - (b(x)+d(x)) f(x)
    // with f extended by zero outside the state space.
    template <class F>
    double apply_forward(F&& f, long x) const {
        check_state(x);
        double out = -(birth(x) + death(x)) * f(x);
        if (x >= 1) out += birth(x - 1) * f(x - 1);
        if (in_state_space(x + 1)) out += death(x + 1) * f(x + 1);
        return out;
    }

    double invariant_mass(long x) const {
        check_state(x);
        if (static_cast<std::size_t>(x) < mass_.size()) return mass_[static_cast<std::size_t>(x)];
        // Infinite state space beyond the cached table: continue the Pearson
        // ratio recursion from the last stored entry.
        double m = mass_.back();
        for (long y = static_cast<long>(mass_.size()) - 1; y < x; ++y)
            m *= birth(y) / death(y + 1);
        return m;
    }

    // Normalized invariant masses for x = 0..size-1. Covers the whole state
    // space when it is finite, otherwise all but a <= 1e-14 relative tail.
    const std::vector<double>& mass_table() const { return mass_; }

    double pearson_residual(long x) const {
        check_state(x);
        const double dm_next = in_state_space(x + 1) ? death(x + 1) * invariant_mass(x + 1) : 0.0;
        return (dm_next - death(x) * invariant_mass(x)) -
               (birth(x) - death(x)) * invariant_mass(x);
    }

    // Limit of b(x)/d(x+1) as x grows (infinite state space only).
    double limit_ratio() const {
        if (finite_state()) throw std::domain_error("limit_ratio: infinite state space only");
        return bcoef_[1] / dcoef_[1];
    }

    // A certified geometric envelope for the invariant measure: a ratio
    // rho in (limit, 1) and the first state x0 with b(x)/d(x+1) < rho for
    // every x >= x0, so that m(x) <= rho^(x - x0) m(x0) beyond it.
    struct GeometricTail {
        double rho;
        long x0;
    };

    GeometricTail geometric_tail() const {
        if (finite_state()) throw std::domain_error("geometric_tail: infinite state space only");
        const double l = limit_ratio();
        const double rho = 0.5 * (1.0 + l);
        // Solve b(x) = rho d(x+1) (linear in x for both infinite families):
        // (b1 - rho d1) x = rho d1 - b0. The slope is negative since
        // b1 < rho d1, so the ratio drops below rho past the root.
        const double slope = bcoef_[1] - rho * dcoef_[1];
        const double root = (rho * dcoef_[1] - bcoef_[0]) / slope;
        long x0 = root < 0.0 ? 0 : static_cast<long>(std::floor(root)) + 1;
        return {rho, x0};
    }

private:
    BirthDeathSpec(ProcessClass c, PolynomialFamily p) : class_(c), poly_(p) {}

    static void require(bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    }

    static bool near_integer(double v) { return std::abs(v - std::lround(v)) <= 1e-9; }

    static double horner(const std::array<double, 3>& c, long x) {
        const double xx = static_cast<double>(x);
        return c[0] + xx * (c[1] + xx * c[2]);
    }

    void check_state(long x) const {
        if (!in_state_space(x))
            throw std::domain_error("state " + std::to_string(x) + " outside the state space");
    }

    // Validate nonnegative rates and build the normalized mass table.
    void finish() {
        if (finite_state()) {
            for (long x = 0; x <= N_; ++x)
                require(birth(x) >= 0.0 && death(x) >= 0.0, "rates must be nonnegative on E");
            mass_.resize(static_cast<std::size_t>(N_) + 1);
            mass_[0] = 1.0;
            NeumaierSum total;
            total.add(1.0);
            for (long x = 0; x < N_; ++x) {
                mass_[x + 1] = mass_[x] * birth(x) / death(x + 1);
                total.add(mass_[x + 1]);
            }
            const double s = total.value();
            for (double& m : mass_) m /= s;
            return;
        }
        const auto tail = geometric_tail();
        mass_.push_back(1.0);
        NeumaierSum total;
        total.add(1.0);
        constexpr long kMaxStates = 200000;
        for (long x = 0;; ++x) {
            if (x >= kMaxStates)
                throw numerical_error("invariant measure truncation did not certify");
            const double next = mass_.back() * birth(x) / death(x + 1);
            mass_.push_back(next);
            total.add(next);
            if (x + 1 >= tail.x0 &&
                next * tail.rho / (1.0 - tail.rho) <= 1e-14 * total.value())
                break;
        }
        const double s = total.value();
        for (double& m : mass_) m /= s;
    }

    ProcessClass class_;
    PolynomialFamily poly_;
    std::array<double, 3> bcoef_{};
    std::array<double, 3> dcoef_{};
    long N_ = -1;  // -1 marks an infinite state space
    std::vector<double> mass_;
};

inline ProcessClass classify(const BirthDeathSpec& spec) { return spec.process_class(); }

inline ProcessClass classify(const std::vector<double>& b, const std::vector<double>& d) {
    return BirthDeathSpec::from_rates(b, d).process_class();
}

}  // namespace nlbd
