#pragma once

// Monte Carlo engine: exact CTMC path sampling, subordinator path sampling on
// an operational-time grid, first-passage inversion, and the composed
// time-changed process. Estimators here cross-validate the series solver.
//
// Reproducibility contract: every random quantity is a pure function of
// (seed, stream tag, sample index). Worker threads only fill disjoint slots
// of preallocated arrays and all floating-point reductions happen afterwards
// in a fixed sequential order, so results are bit-identical for any worker
// count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nlbd/bdprocess.hpp"
#include "nlbd/bernstein.hpp"
#include "nlbd/errors.hpp"
#include "nlbd/summation.hpp"

namespace nlbd {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kChainTag = 0x636861696eULL;       // chain clocks
inline constexpr std::uint64_t kSubordinatorTag = 0x737562ULL;    // subordinator increments
inline constexpr std::uint64_t kInitTag = 0x696e6974ULL;          // initial-state draws

}  // namespace detail

// Deterministic random stream with hand-rolled transforms. The standard
// engine is seeded through a splitmix64 chain; the variate transforms are
// spelled out here rather than taken from <random> distributions because the
// library leaves those implementation-defined, and the reproducibility
// contract requires identical streams across standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    // Stream keyed by (seed, tag, index); used to give every sample its own
    // independent chain / subordinator / initial-state streams.
    static RngStream derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
        std::uint64_t s = seed;
        std::uint64_t h = detail::splitmix64(s);
        s = h ^ (tag * 0xD6E8FEB86659FD93ULL);
        h = detail::splitmix64(s);
        s = h ^ (index * 0xA3B195354A39B70DULL);
        return RngStream(detail::splitmix64(s));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on the open interval (0,1): 53 random bits centered in the bin.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // Box-Muller, cosine branch only; no cached second variate, so the draw
    // count per sample is a fixed function of the accepted path.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Marsaglia-Tsang squeeze for shape >= 1; boosting for shape < 1.
    double gamma(double shape) {
        if (!(shape >= 0.0)) throw std::domain_error("gamma: shape must be nonnegative");
        if (shape == 0.0) return 0.0;
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Standard positive alpha-stable variate, E[e^{-lambda S}] = e^{-lambda^alpha},
    // via Kanter's exact two-variate representation S = (a(U)/W)^{(1-alpha)/alpha}
    // with U uniform on (0,pi) and W unit exponential. Evaluated in logs.
    double positive_stable(double alpha) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::domain_error("positive_stable: alpha must lie in (0,1)");
        const double u = std::numbers::pi * uniform();
        const double w = exponential(1.0);
        const double log_a = (alpha / (1.0 - alpha)) * std::log(std::sin(alpha * u)) +
                             std::log(std::sin((1.0 - alpha) * u)) -
                             (1.0 / (1.0 - alpha)) * std::log(std::sin(u));
        return std::exp(((1.0 - alpha) / alpha) * (log_a - std::log(w)));
    }

private:
    std::mt19937_64 eng_;
};

// Subordinator sample path on the operational-time grid {0, step, 2*step, ...}.
// values[i] is the level at grid index i; values[0] = 0. Mathematically the
// path is a.s. strictly increasing; increments below double resolution can
// collapse to ties, which the first-passage readoff handles.
struct MonotonePath {
    double step = 0.0;
    std::vector<double> values;

    double time_at(std::size_t i) const { return step * static_cast<double>(i); }
    double last() const { return values.back(); }
};

// CTMC trajectory: state after the k-th jump, jump epochs strictly increasing.
struct ChainPath {
    long initial = 0;
    std::vector<double> event_times;
    std::vector<long> states;

    long state_at(double tau) const {
        auto it = std::upper_bound(event_times.begin(), event_times.end(), tau);
        if (it == event_times.begin()) return initial;
        return states[static_cast<std::size_t>(it - event_times.begin()) - 1];
    }
};

namespace detail {

// One subordinator increment over operational time h, exact in law.
inline double subordinator_increment(const BernsteinFunction& fn, double h, RngStream& rng) {
    switch (fn.kind()) {
        case BernsteinKind::Stable:
            return std::pow(h, 1.0 / fn.alpha()) * rng.positive_stable(fn.alpha());
        case BernsteinKind::Gamma:
            return rng.gamma(h);
        case BernsteinKind::GeometricStable: {
            // sigma(h) = S(G(h)): a stable subordinator run on a gamma clock.
            const double g = rng.gamma(h);
            if (fn.alpha() == 1.0) return g;
            return std::pow(g, 1.0 / fn.alpha()) * rng.positive_stable(fn.alpha());
        }
        case BernsteinKind::TemperedStable: {
            // Exponential-tilting rejection: propose a stable increment s and
            // accept with probability e^{-theta s}; the acceptance rate over a
            // span h is e^{-h theta^alpha}, so spans are split until each
            // piece accepts at 1% or better. A failed budget raises; the
            // sampler never silently biases the law.
            const double alpha = fn.alpha(), theta = fn.theta();
            const double rate = std::pow(theta, alpha);
            const double unit = std::log(100.0);
            const long pieces = h * rate > unit ? static_cast<long>(std::ceil(h * rate / unit)) : 1;
            const double hp = h / static_cast<double>(pieces);
            const double scale = std::pow(hp, 1.0 / alpha);
            double total = 0.0;
            for (long p = 0; p < pieces; ++p) {
                bool accepted = false;
                for (int attempt = 0; attempt < 10000; ++attempt) {
                    const double s = scale * rng.positive_stable(alpha);
                    if (rng.uniform() < std::exp(-theta * s)) {
                        total += s;
                        accepted = true;
                        break;
                    }
                }
                if (!accepted)
                    throw numerical_error("tempered-stable rejection budget exceeded");
            }
            return total;
        }
        case BernsteinKind::Custom:
            throw std::invalid_argument(
                "simulation requires one of the built-in subordinator families");
    }
    throw std::logic_error("subordinator_increment: unreachable");
}

}  // namespace detail

// Exact-in-law trajectory of the base chain up to the operational horizon:
// holding time Exponential(b(x)+d(x)), upward move with probability b/(b+d).
inline ChainPath sample_chain(const BirthDeathSpec& spec, long y0, double horizon,
                              RngStream& rng) {
    if (!spec.in_state_space(y0)) throw std::domain_error("sample_chain: y0 outside state space");
    if (!(horizon > 0.0)) throw std::domain_error("sample_chain: horizon must be positive");
    ChainPath path;
    path.initial = y0;
    double t = 0.0;
    long x = y0;
    for (;;) {
        const double b = spec.birth(x);
        const double d = spec.death(x);
        const double total = b + d;
        if (total <= 0.0) break;  // frozen path; solvable specs never reach this
        t += rng.exponential(total);
        if (t > horizon) break;
        x += (rng.uniform() * total < b) ? 1 : -1;
        path.event_times.push_back(t);
        path.states.push_back(x);
        if (path.event_times.size() > 10000000)
            throw numerical_error("chain event budget exceeded; horizon too long for these rates");
    }
    return path;
}

// Subordinator path on a fixed grid, extended until the level exceeds the
// calendar horizon, so first-passage readoff is always covered.
inline MonotonePath sample_subordinator(const BernsteinFunction& fn, double horizon, double step,
                                        RngStream& rng) {
    if (!(horizon > 0.0)) throw std::domain_error("sample_subordinator: horizon must be positive");
    if (!(step > 0.0)) throw std::domain_error("sample_subordinator: step must be positive");
    MonotonePath path;
    path.step = step;
    path.values.push_back(0.0);
    while (!(path.values.back() > horizon)) {
        path.values.push_back(path.values.back() +
                              detail::subordinator_increment(fn, step, rng));
        if (path.values.size() > 10000000)
            throw numerical_error("subordinator path budget exceeded; step too small for horizon");
    }
    return path;
}

// First passage E(t) = inf{y : sigma(y) > t}, read off the grid: the smallest
// grid point whose level exceeds t. The discretization bias is one-sided,
// at most one grid step upward. t = 0 is exact: the path is a.s. strictly
// increasing at 0, so the infimum is 0.
inline double inverse_time(const MonotonePath& path, double t) {
    if (t < 0.0) throw std::domain_error("inverse_time: t must be nonnegative");
    if (t == 0.0) return 0.0;
    if (path.values.empty() || !(path.values.back() > t))
        throw numerical_error("inverse_time: path does not cover the requested time");
    auto it = std::upper_bound(path.values.begin(), path.values.end(), t);
    return path.time_at(static_cast<std::size_t>(it - path.values.begin()));
}

// States N(E(t_i)) of the time-changed process at the requested calendar
// times, from one chain path and one independent subordinator path. The grid
// step defaults to 1e-3 of the expected operational depth E[E(t_max)], which
// is the potential function at the horizon.
inline std::vector<long> sample_time_changed(const BirthDeathSpec& spec,
                                             const BernsteinFunction& fn, long y0,
                                             const std::vector<double>& times,
                                             RngStream& chain_rng, RngStream& sub_rng,
                                             double step_hint = 0.0) {
    if (!spec.in_state_space(y0))
        throw std::domain_error("sample_time_changed: y0 outside state space");
    if (times.empty()) return {};
    double t_max = 0.0;
    for (double t : times) {
        if (t < 0.0) throw std::domain_error("sample_time_changed: times must be nonnegative");
        t_max = std::max(t_max, t);
    }
    std::vector<long> out(times.size(), y0);
    if (t_max == 0.0) return out;

    const double step =
        step_hint > 0.0 ? step_hint : 1e-3 * std::max(fn.potential(t_max), 1e-12);
    const MonotonePath sigma = sample_subordinator(fn, t_max, step, sub_rng);

    std::vector<double> op_times(times.size());
    double op_max = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        op_times[i] = inverse_time(sigma, times[i]);
        op_max = std::max(op_max, op_times[i]);
    }
    if (op_max == 0.0) return out;

    const ChainPath chain = sample_chain(spec, y0, op_max, chain_rng);
    for (std::size_t i = 0; i < times.size(); ++i) out[i] = chain.state_at(op_times[i]);
    return out;
}

namespace detail {

// Draw from the invariant distribution by inverting the cumulative mass.
inline long stationary_draw(const BirthDeathSpec& spec, RngStream& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    const long hard_cap = spec.finite_state() ? spec.upper_state()
                                              : static_cast<long>(spec.mass_table().size()) + 10000;
    for (long x = 0; x <= hard_cap; ++x) {
        cum += spec.invariant_mass(x);
        if (u < cum) return x;
    }
    return hard_cap;  // reachable only through the ~1e-14 unrepresented tail mass
}

inline unsigned resolve_threads(long requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("NLBD_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Run `body(i)` for i in [0, n) across workers. Each index must touch only
// its own slots. The first exception, if any, is rethrown in order.
template <class Body>
inline void parallel_for_index(long n, long threads_requested, Body&& body) {
    const unsigned workers =
        std::min<unsigned>(resolve_threads(threads_requested),
                           static_cast<unsigned>(std::max<long>(n, 1)));
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            const long lo = n * static_cast<long>(w) / static_cast<long>(workers);
            const long hi = n * static_cast<long>(w + 1) / static_cast<long>(workers);
            try {
                for (long i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

// Ensemble of time-changed trajectories read at the given calendar times.
// result[i][j] = state of sample i at times[j]. y0 = nullopt draws each
// sample's initial state from the invariant distribution.
inline std::vector<std::vector<long>> simulate_ensemble(
    const BirthDeathSpec& spec, const BernsteinFunction& fn, std::optional<long> y0,
    const std::vector<double>& times, long n_samples, std::uint64_t seed, long threads = 0) {
    if (n_samples <= 0) throw std::invalid_argument("simulate_ensemble: need a positive sample count");
    double t_max = 0.0;
    for (double t : times) t_max = std::max(t_max, t);
    const double step =
        t_max > 0.0 ? 1e-3 * std::max(fn.potential(t_max), 1e-12) : 0.0;

    std::vector<std::vector<long>> out(static_cast<std::size_t>(n_samples));
    detail::parallel_for_index(n_samples, threads, [&](long i) {
        const auto idx = static_cast<std::uint64_t>(i);
        RngStream chain_rng = RngStream::derive(seed, detail::kChainTag, idx);
        RngStream sub_rng = RngStream::derive(seed, detail::kSubordinatorTag, idx);
        long start;
        if (y0) {
            start = *y0;
        } else {
            RngStream init_rng = RngStream::derive(seed, detail::kInitTag, idx);
            start = detail::stationary_draw(spec, init_rng);
        }
        out[static_cast<std::size_t>(i)] =
            sample_time_changed(spec, fn, start, times, chain_rng, sub_rng, step);
    });
    return out;
}

// Empirical pmf over states 0..max(draws).
inline std::vector<double> empirical_pmf(const std::vector<long>& draws) {
    if (draws.empty()) return {};
    const long top = *std::max_element(draws.begin(), draws.end());
    std::vector<double> pmf(static_cast<std::size_t>(top) + 1, 0.0);
    for (long d : draws) pmf[static_cast<std::size_t>(d)] += 1.0;
    for (double& p : pmf) p /= static_cast<double>(draws.size());
    return pmf;
}

struct CovarianceEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long n_samples = 0;
};

// Monte Carlo covariance of (N_Phi(t), N_Phi(s)) under the stationary start,
// with a leave-one-out jackknife standard error. Sample generation is
// slot-indexed and the reduction below is sequential, so the estimate is
// bit-identical for any worker count.
inline CovarianceEstimate mc_covariance(const BirthDeathSpec& spec, const BernsteinFunction& fn,
                                        double t, double s, long n_samples, std::uint64_t seed,
                                        long threads = 0) {
    if (n_samples < 100)
        throw std::invalid_argument("mc_covariance: at least 100 samples required");
    const std::vector<double> times{t, s};
    const auto states = simulate_ensemble(spec, fn, std::nullopt, times, n_samples, seed, threads);

    const double n = static_cast<double>(n_samples);
    NeumaierSum sx, sy, sxy;
    for (long i = 0; i < n_samples; ++i) {
        const double xi = static_cast<double>(states[static_cast<std::size_t>(i)][0]);
        const double yi = static_cast<double>(states[static_cast<std::size_t>(i)][1]);
        sx.add(xi);
        sy.add(yi);
        sxy.add(xi * yi);
    }
    const double Sx = sx.value(), Sy = sy.value(), Sxy = sxy.value();
    const double cov = (Sxy - Sx * Sy / n) / (n - 1.0);

    // Jackknife in O(n): the leave-one-out covariance has a closed update.
    NeumaierSum jk_sum, jk_sq;
    std::vector<double> loo(static_cast<std::size_t>(n_samples));
    for (long i = 0; i < n_samples; ++i) {
        const double xi = static_cast<double>(states[static_cast<std::size_t>(i)][0]);
        const double yi = static_cast<double>(states[static_cast<std::size_t>(i)][1]);
        const double c =
            (Sxy - xi * yi - (Sx - xi) * (Sy - yi) / (n - 1.0)) / (n - 2.0);
        loo[static_cast<std::size_t>(i)] = c;
        jk_sum.add(c);
    }
    const double jk_mean = jk_sum.value() / n;
    for (long i = 0; i < n_samples; ++i) {
        const double d = loo[static_cast<std::size_t>(i)] - jk_mean;
        jk_sq.add(d * d);
    }
    const double se = std::sqrt((n - 1.0) / n * jk_sq.value());
    return {cov, se, n_samples};
}

}  // namespace nlbd
