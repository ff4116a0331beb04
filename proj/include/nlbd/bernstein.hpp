#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "nlbd/gammafn.hpp"
#include "nlbd/laplace.hpp"

namespace nlbd {

enum class BernsteinKind { Stable, TemperedStable, GeometricStable, Gamma, Custom };

// Driftless Bernstein function Phi(lambda) = int_0^infty (1 - e^{-lambda t}) nu(dt)
// together with its Levy tail nu_bar(t) = nu(t, infty). The four built-in
// families:
//   Stable           Phi = lambda^alpha,              nu_bar = t^{-a}/Gamma(1-a)
//   TemperedStable   Phi = (lambda+theta)^a - theta^a nu_bar = a theta^a Gamma(-a, theta t)/Gamma(1-a)
//   GeometricStable  Phi = log(1 + lambda^a),         nu_bar by Laplace inversion
//   Gamma            Phi = log(1 + lambda),           nu_bar = E_1(t)
// A custom hook accepts a user-supplied Phi analytic on the cut plane; its
// Bernstein sign pattern is checked numerically at construction.
class BernsteinFunction {
public:
    using complex = std::complex<double>;

    static BernsteinFunction stable(double alpha) {
        check_alpha_open(alpha);
        BernsteinFunction f(BernsteinKind::Stable);
        f.alpha_ = alpha;
        return f;
    }

    static BernsteinFunction tempered_stable(double alpha, double theta) {
        check_alpha_open(alpha);
        if (!(theta > 0.0)) throw std::invalid_argument("tempered stable: theta must be positive");
        BernsteinFunction f(BernsteinKind::TemperedStable);
        f.alpha_ = alpha;
        f.theta_ = theta;
        return f;
    }

    static BernsteinFunction geometric_stable(double alpha) {
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw std::invalid_argument("geometric stable: alpha must lie in (0, 1]");
        BernsteinFunction f(BernsteinKind::GeometricStable);
        f.alpha_ = alpha;
        return f;
    }

    static BernsteinFunction gamma() {
        BernsteinFunction f(BernsteinKind::Gamma);
        f.alpha_ = 1.0;
        return f;
    }

    // User-supplied Phi, analytic on the cut plane C minus (-infty, 0]. The
    // driftless Bernstein sign pattern (Phi(0)=0, Phi' > 0, alternating higher
    // differences) is spot-checked on a log grid.
    static BernsteinFunction custom(std::function<complex(complex)> phi) {
        BernsteinFunction f(BernsteinKind::Custom);
        f.custom_ = std::move(phi);
        if (std::abs(f.phi(0.0)) > 1e-12)
            throw std::invalid_argument("custom Bernstein function: Phi(0) must be 0");
        for (double lam = 1e-3; lam < 1e4; lam *= 10.0) {
            const double h = lam * 0.25;
            double g[5];
            for (int i = 0; i < 5; ++i) g[i] = f.phi(lam + i * h);
            // first differences of Phi' proxy: forward differences of Phi
            double d1[4], d2[3], d3[2];
            for (int i = 0; i < 4; ++i) d1[i] = g[i + 1] - g[i];
            for (int i = 0; i < 3; ++i) d2[i] = d1[i + 1] - d1[i];
            for (int i = 0; i < 2; ++i) d3[i] = d2[i + 1] - d2[i];
            const double slack = 1e-12 * std::abs(g[4]);
            const bool ok = d1[0] > 0.0 && d1[3] > 0.0 && d2[0] <= slack && d2[2] <= slack &&
                            d3[0] >= -slack;
            if (!ok)
                throw std::invalid_argument(
                    "custom Bernstein function: sign pattern violated on probe grid");
        }
        return f;
    }

    BernsteinKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double theta() const { return theta_; }

    double phi(double lambda) const {
        if (lambda < 0.0) throw std::domain_error("phi: lambda must be nonnegative");
        if (lambda == 0.0) return 0.0;
        switch (kind_) {
            case BernsteinKind::Stable:
                return std::pow(lambda, alpha_);
            case BernsteinKind::TemperedStable:
                return std::pow(lambda + theta_, alpha_) - std::pow(theta_, alpha_);
            case BernsteinKind::GeometricStable:
                return std::log1p(std::pow(lambda, alpha_));
            case BernsteinKind::Gamma:
                return std::log1p(lambda);
            case BernsteinKind::Custom:
                return custom_(complex(lambda, 0.0)).real();
        }
        throw std::logic_error("phi: unreachable");
    }

    // Principal-branch extension to the cut plane, used by contour inversion.
    complex phi(complex s) const {
        switch (kind_) {
            case BernsteinKind::Stable:
                return std::pow(s, alpha_);
            case BernsteinKind::TemperedStable:
                return std::pow(s + theta_, alpha_) - std::pow(theta_, alpha_);
            case BernsteinKind::GeometricStable:
                return std::log(1.0 + std::pow(s, alpha_));
            case BernsteinKind::Gamma:
                return std::log(1.0 + s);
            case BernsteinKind::Custom:
                return custom_(s);
        }
        throw std::logic_error("phi: unreachable");
    }

    // nu_bar(t) = nu(t, infty). Its Laplace transform is Phi(eta)/eta, which
    // supplies the families without a closed form.
    double levy_tail(double t) const {
        if (!(t > 0.0)) throw std::domain_error("levy_tail: t must be positive");
        switch (kind_) {
            case BernsteinKind::Stable:
                return std::pow(t, -alpha_) / std::tgamma(1.0 - alpha_);
            case BernsteinKind::TemperedStable:
                return alpha_ * std::pow(theta_, alpha_) * upper_gamma(-alpha_, theta_ * t) /
                       std::tgamma(1.0 - alpha_);
            case BernsteinKind::GeometricStable:
                if (alpha_ == 1.0) return expint_e1(t);
                return invert_tail(t);
            case BernsteinKind::Gamma:
                return expint_e1(t);
            case BernsteinKind::Custom:
                return invert_tail(t);
        }
        throw std::logic_error("levy_tail: unreachable");
    }

    // Laplace transform of the eigenfunction e_Phi(t; -lambda):
    // e_hat(eta) = Phi(eta)/(eta (Phi(eta) + lambda)), lambda > 0.
    double eigen_laplace(double lambda, double eta) const {
        if (!(lambda > 0.0 && eta > 0.0))
            throw std::domain_error("eigen_laplace: lambda and eta must be positive");
        const double p = phi(eta);
        return p / (eta * (p + lambda));
    }

    complex eigen_laplace(double lambda, complex eta) const {
        const complex p = phi(eta);
        return p / (eta * (p + lambda));
    }

    // Potential (renewal) function U(t) of the subordinator, the expected
    // time the inverse process has accumulated by t: Laplace transform
    // 1/(eta Phi(eta)). Closed form t^alpha/Gamma(1+alpha) in the stable case.
    double potential(double t) const {
        if (!(t > 0.0)) throw std::domain_error("potential: t must be positive");
        if (kind_ == BernsteinKind::Stable)
            return std::pow(t, alpha_) / std::tgamma(1.0 + alpha_);
        return talbot_invert([this](complex s) { return 1.0 / (s * phi(s)); }, t, 32);
    }

    // Density U'(t), Laplace transform 1/Phi(eta).
    double potential_density(double t) const {
        if (!(t > 0.0)) throw std::domain_error("potential_density: t must be positive");
        if (kind_ == BernsteinKind::Stable)
            return std::pow(t, alpha_ - 1.0) / std::tgamma(alpha_);
        return talbot_invert([this](complex s) { return 1.0 / phi(s); }, t, 32);
    }

private:
    explicit BernsteinFunction(BernsteinKind k) : kind_(k) {}

    static void check_alpha_open(double alpha) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("alpha must lie in (0, 1)");
    }

    double invert_tail(double t) const {
        return talbot_invert([this](complex s) { return phi(s) / s; }, t, 32);
    }

    BernsteinKind kind_;
    double alpha_ = 0.0;
    double theta_ = 0.0;
    std::function<complex(complex)> custom_;
};

}  // namespace nlbd
