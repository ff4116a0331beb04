#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "nlbd/bernstein.hpp"

using nlbd::BernsteinFunction;
using nlbd::BernsteinKind;

namespace {

// Simpson quadrature oracle used for the incomplete-gamma style tails.
double simpson(const std::function<double(double)>& f, double a, double b, long panels) {
    const double h = (b - a) / (2.0 * panels);
    double sum = f(a) + f(b);
    for (long k = 1; k < 2 * panels; ++k) sum += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Frozen references computed from extended-precision summation of the
// defining series/integrals before the library existed.
constexpr double kRecipGammaHalf = 0.56418958354775628695;   // 1/Gamma(1/2)
constexpr double kExpIntOne = 0.21938393439552027368;        // E_1(1)

}  // namespace

TEST_CASE("laplace exponents") {
    SECTION("closed forms") {
        REQUIRE(BernsteinFunction::stable(0.5).phi(4.0) == 2.0);
        REQUIRE(BernsteinFunction::tempered_stable(0.5, 1.0).phi(0.0) == 0.0);
        REQUIRE(BernsteinFunction::geometric_stable(0.7).phi(1.0) ==
                Catch::Approx(std::log(2.0)).epsilon(1e-14));
    }
    SECTION("driftless: phi vanishes at zero") {
        REQUIRE(BernsteinFunction::stable(0.3).phi(0.0) == 0.0);
        REQUIRE(BernsteinFunction::geometric_stable(0.9).phi(0.0) == 0.0);
        REQUIRE(BernsteinFunction::gamma().phi(0.0) == 0.0);
    }
    SECTION("gamma is geometric-stable at alpha one") {
        const auto g = BernsteinFunction::gamma();
        const auto gs = BernsteinFunction::geometric_stable(1.0);
        for (double lam : {0.1, 1.0, 7.0, 100.0})
            REQUIRE(g.phi(lam) == Catch::Approx(gs.phi(lam)).epsilon(1e-14));
    }
    SECTION("stable power is exact on the listed grid") {
        const auto s = BernsteinFunction::stable(0.5);
        for (double lam : {0.0, 1.0, 2.0, 10.0})
            REQUIRE(s.phi(lam) == std::pow(lam, 0.5));
    }
    SECTION("negative argument rejected") {
        REQUIRE_THROWS_AS(BernsteinFunction::stable(0.5).phi(-1.0), std::domain_error);
    }
    SECTION("parameter validation") {
        REQUIRE_THROWS_AS(BernsteinFunction::stable(1.5), std::invalid_argument);
        REQUIRE_THROWS_AS(BernsteinFunction::stable(0.0), std::invalid_argument);
        REQUIRE_THROWS_AS(BernsteinFunction::tempered_stable(0.5, -1.0),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(BernsteinFunction::geometric_stable(1.2), std::invalid_argument);
    }
}

TEST_CASE("levy tails") {
    SECTION("stable closed form") {
        REQUIRE(BernsteinFunction::stable(0.5).levy_tail(1.0) ==
                Catch::Approx(kRecipGammaHalf).epsilon(1e-13));
        // scaling t^{-alpha}
        const auto s = BernsteinFunction::stable(0.3);
        REQUIRE(s.levy_tail(2.0) / s.levy_tail(1.0) ==
                Catch::Approx(std::pow(2.0, -0.3)).epsilon(1e-12));
    }
    SECTION("gamma tail is the exponential integral") {
        const auto g = BernsteinFunction::gamma();
        REQUIRE(g.levy_tail(1.0) == Catch::Approx(kExpIntOne).epsilon(1e-12));
        // quadrature oracle for a second point
        const double oracle =
            simpson([](double u) { return std::exp(-u) / u; }, 0.5, 60.0, 40000);
        REQUIRE(g.levy_tail(0.5) == Catch::Approx(oracle).epsilon(1e-9));
    }
    SECTION("tempered tail against direct quadrature of the levy density") {
        // nu(ds) has density alpha/Gamma(1-alpha) s^{-1-alpha} e^{-theta s}
        const double alpha = 0.5, theta = 1.0;
        const auto f = BernsteinFunction::tempered_stable(alpha, theta);
        for (double t : {0.5, 2.0}) {
            const double oracle = simpson(
                [&](double s) {
                    return alpha / std::tgamma(1.0 - alpha) *
                           std::pow(s, -1.0 - alpha) * std::exp(-theta * s);
                },
                t, t + 80.0, 60000);
            REQUIRE(f.levy_tail(t) == Catch::Approx(oracle).epsilon(1e-7));
        }
    }
    SECTION("geometric-stable tail matches its stated asymptotics") {
        const auto f = BernsteinFunction::geometric_stable(0.6);
        for (double t : {100.0, 1000.0}) {
            const double scaled =
                f.levy_tail(t) * std::tgamma(1.0 - 0.6) * std::pow(t, 0.6);
            REQUIRE(scaled == Catch::Approx(1.0).margin(0.05));
        }
    }
    SECTION("nonincreasing and integrable near zero") {
        const BernsteinFunction fns[] = {
            BernsteinFunction::stable(0.5),
            BernsteinFunction::tempered_stable(0.5, 1.0),
            BernsteinFunction::gamma(),
            BernsteinFunction::geometric_stable(0.6),
        };
        for (const auto& f : fns) {
            double prev = f.levy_tail(1e-4);
            for (double t : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
                const double cur = f.levy_tail(t);
                REQUIRE(cur <= prev * (1.0 + 1e-12));
                prev = cur;
            }
            // dyadic blocks of the integral over (0, 1]: partial sums settle,
            // certifying numerically that the tail is integrable at zero
            double total = 0.0;
            std::vector<double> blocks;
            for (int k = 0; k < 40; ++k) {
                const double hi = std::pow(2.0, -k), lo = hi / 2.0;
                const double piece =
                    simpson([&](double t) { return f.levy_tail(t); }, lo, hi, 64);
                blocks.push_back(piece);
                total += piece;
            }
            REQUIRE(std::isfinite(total));
            REQUIRE(blocks.back() <= 1e-4 * total);
            REQUIRE_THROWS_AS(f.levy_tail(0.0), std::domain_error);
        }
    }
}

TEST_CASE("laplace-domain eigen building block") {
    SECTION("stable transform pair") {
        // term-by-term transform of the relaxation series gives
        // eta^{alpha-1} / (eta^alpha + lambda)
        for (double alpha : {0.3, 0.5, 0.8}) {
            const auto f = BernsteinFunction::stable(alpha);
            for (double lam : {0.5, 1.0, 4.0})
                for (double eta : {0.1, 1.0, 10.0}) {
                    const double want =
                        std::pow(eta, alpha - 1.0) / (std::pow(eta, alpha) + lam);
                    REQUIRE(f.eigen_laplace(lam, eta) ==
                            Catch::Approx(want).epsilon(1e-13));
                }
        }
    }
    SECTION("vanishing decay rate gives the transform of the constant one") {
        const auto f = BernsteinFunction::gamma();
        for (double eta : {0.5, 2.0})
            REQUIRE(f.eigen_laplace(1e-14, eta) == Catch::Approx(1.0 / eta).epsilon(1e-10));
    }
    SECTION("initial value recovered as eta grows") {
        // eta * transform = Phi(eta) / (Phi(eta) + lambda) -> 1; the approach
        // is power-law for the stable-type exponents but only logarithmic for
        // the gamma family, so each family is held to its own limit rate
        const double eta = 1e8;
        const BernsteinFunction fns[] = {
            BernsteinFunction::stable(0.5),
            BernsteinFunction::tempered_stable(0.4, 2.0),
            BernsteinFunction::gamma(),
        };
        for (const auto& f : fns) {
            const double defect = 1.0 / (f.phi(eta) + 1.0);
            REQUIRE(1e8 * f.eigen_laplace(1.0, eta) ==
                    Catch::Approx(1.0 - defect).margin(1e-10));
            REQUIRE(defect < 0.06);
        }
    }
}

TEST_CASE("bernstein shape properties") {
    const BernsteinFunction fns[] = {
        BernsteinFunction::stable(0.4),
        BernsteinFunction::tempered_stable(0.6, 0.5),
        BernsteinFunction::geometric_stable(0.8),
        BernsteinFunction::gamma(),
    };
    for (const auto& f : fns) {
        // first differences positive (increasing), second differences
        // nonpositive (concave), third nonnegative: the first rungs of the
        // complete-monotonicity ladder on a log grid
        std::vector<double> g;
        for (int k = -6; k <= 6; ++k) g.push_back(f.phi(std::pow(2.0, k)));
        for (std::size_t i = 0; i + 1 < g.size(); ++i) REQUIRE(g[i + 1] > g[i]);
        std::vector<double> lin;  // uniform grid for difference signs
        for (int k = 0; k <= 8; ++k) lin.push_back(f.phi(0.5 + 0.25 * k));
        const double scale = std::abs(lin.back());
        for (std::size_t i = 0; i + 2 < lin.size(); ++i)
            REQUIRE(lin[i + 2] - 2.0 * lin[i + 1] + lin[i] <= 1e-12 * scale);
        for (std::size_t i = 0; i + 3 < lin.size(); ++i)
            REQUIRE(lin[i + 3] - 3.0 * lin[i + 2] + 3.0 * lin[i + 1] - lin[i] >=
                    -1e-12 * scale);
    }
}

TEST_CASE("tempered limit recovers the stable exponent") {
    // the gap (lam+theta)^a - theta^a - lam^a is dominated by theta^a, so the
    // tempering parameter must sit well below the target margin to the 1/a
    const auto nearly = BernsteinFunction::tempered_stable(0.5, 1e-14);
    const auto target = BernsteinFunction::stable(0.5);
    for (double lam : {0.5, 1.0, 2.0, 10.0})
        REQUIRE(nearly.phi(lam) == Catch::Approx(target.phi(lam)).margin(1e-6));
}

TEST_CASE("custom exponent hook") {
    SECTION("identity accepted and evaluated") {
        const auto f =
            BernsteinFunction::custom([](std::complex<double> z) { return z; });
        REQUIRE(f.kind() == BernsteinKind::Custom);
        REQUIRE(f.phi(3.0) == Catch::Approx(3.0).epsilon(1e-14));
    }
    SECTION("square rejected by the sign probe") {
        REQUIRE_THROWS_AS(
            BernsteinFunction::custom([](std::complex<double> z) { return z * z; }),
            std::invalid_argument);
    }
    SECTION("decreasing map rejected") {
        REQUIRE_THROWS_AS(BernsteinFunction::custom(
                              [](std::complex<double> z) { return -z; }),
                          std::invalid_argument);
    }
}

TEST_CASE("potential function of the subordinator") {
    SECTION("stable closed form") {
        const auto f = BernsteinFunction::stable(0.5);
        REQUIRE(f.potential(1.0) ==
                Catch::Approx(1.0 / std::tgamma(1.5)).epsilon(1e-12));
        REQUIRE_THROWS_AS(f.potential(0.0), std::domain_error);
    }
    SECTION("nondecreasing for every family") {
        const BernsteinFunction fns[] = {
            BernsteinFunction::stable(0.5),
            BernsteinFunction::tempered_stable(0.5, 1.0),
            BernsteinFunction::gamma(),
            BernsteinFunction::geometric_stable(0.6),
        };
        for (const auto& f : fns) {
            double prev = 0.0;
            for (double t : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
                const double cur = f.potential(t);
                REQUIRE(cur >= prev);
                prev = cur;
            }
        }
    }
}
