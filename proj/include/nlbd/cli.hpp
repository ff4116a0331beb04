#pragma once

// Command-layer plumbing shared by the CLI binary and its tests: JSON config
// ingestion, deterministic CSV/JSON emission, and the drivers behind the
// solve / simulate / covariance / classify / selftest subcommands.
//
// Output contract: CSV numbers carry 17 significant digits, newline is '\n',
// and every run is a deterministic function of (config, seed). Each CSV gets
// a JSON sidecar at <out>.json echoing the configuration and run summary.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nlbd/bdprocess.hpp"
#include "nlbd/bernstein.hpp"
#include "nlbd/correlation.hpp"
#include "nlbd/eigenfn.hpp"
#include "nlbd/errors.hpp"
#include "nlbd/simulate.hpp"
#include "nlbd/spectral.hpp"

namespace nlbd::cli {

using nlohmann::json;

// Configuration problems: reported as machine-readable JSON with exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flag values that take precedence over config-file fields.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<long> samples;
    std::optional<std::string> out;
};

inline std::string g17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    out.flush();
    if (!out.good()) throw std::runtime_error("failed writing output file: " + path);
}

inline json load_config(const std::optional<std::string>& path) {
    try {
        if (path) {
            std::ifstream in(*path);
            if (!in) throw config_error("cannot open config file: " + *path);
            return json::parse(in);
        }
        return json::parse(std::cin);
    } catch (const json::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
}

namespace detail {

inline const json& need(const json& j, const char* key, const char* ctx) {
    auto it = j.find(key);
    if (it == j.end())
        throw config_error(std::string(ctx) + ": missing field '" + key + "'");
    return *it;
}

inline double need_num(const json& j, const char* key, const char* ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_number())
        throw config_error(std::string(ctx) + ": field '" + key + "' must be a number");
    return v.get<double>();
}

inline long need_int(const json& j, const char* key, const char* ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_number_integer())
        throw config_error(std::string(ctx) + ": field '" + key + "' must be an integer");
    return v.get<long>();
}

inline std::vector<double> rate_array(const json& j, const char* key, const char* ctx) {
    const json& v = need(j, key, ctx);
    if (!v.is_array() || v.empty() || v.size() > 3)
        throw config_error(std::string(ctx) + ": '" + key +
                           "' must be an array of 1 to 3 coefficients");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number())
            throw config_error(std::string(ctx) + ": '" + key + "' entries must be numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

}  // namespace detail

inline BirthDeathSpec process_from_json(const json& full) {
    if (!full.is_object()) throw config_error("process: must be an object");
    const std::string family = detail::need(full, "family", "process").get<std::string>();
    // parameters may sit beside "family" or inside a nested "params" object
    const json& j = full.contains("params") ? full.at("params") : full;
    try {
        if (family == "immigration-death")
            return BirthDeathSpec::immigration_death(detail::need_num(j, "b", "process"),
                                                     detail::need_num(j, "d", "process"));
        if (family == "meixner")
            return BirthDeathSpec::meixner(detail::need_num(j, "b", "process"),
                                           detail::need_num(j, "d", "process"),
                                           detail::need_num(j, "beta", "process"));
        if (family == "krawtchouk")
            return BirthDeathSpec::krawtchouk(detail::need_int(j, "N", "process"),
                                              detail::need_num(j, "b", "process"),
                                              detail::need_num(j, "d", "process"));
        if (family == "hahn")
            return BirthDeathSpec::hahn(detail::need_int(j, "N", "process"),
                                        detail::need_int(j, "alpha", "process"),
                                        detail::need_int(j, "beta", "process"),
                                        detail::need_num(j, "d", "process"));
        if (family == "rates")
            return BirthDeathSpec::from_rates(detail::rate_array(j, "b", "process"),
                                              detail::rate_array(j, "d", "process"));
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("process: ") + e.what());
    } catch (const std::domain_error& e) {
        throw config_error(std::string("process: ") + e.what());
    }
    throw config_error("process: unknown family '" + family + "'");
}

inline BernsteinFunction bernstein_from_json(const json& full) {
    if (!full.is_object()) throw config_error("bernstein: must be an object");
    // "kind" and "family" are interchangeable here
    const std::string family =
        full.contains("kind") ? full.at("kind").get<std::string>()
                              : detail::need(full, "family", "bernstein").get<std::string>();
    const json& j = full.contains("params") ? full.at("params") : full;
    try {
        if (family == "stable")
            return BernsteinFunction::stable(detail::need_num(j, "alpha", "bernstein"));
        if (family == "tempered-stable")
            return BernsteinFunction::tempered_stable(detail::need_num(j, "alpha", "bernstein"),
                                                      detail::need_num(j, "theta", "bernstein"));
        if (family == "geometric-stable")
            return BernsteinFunction::geometric_stable(detail::need_num(j, "alpha", "bernstein"));
        if (family == "gamma") return BernsteinFunction::gamma();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("bernstein: ") + e.what());
    }
    throw config_error("bernstein: unknown family '" + family + "'");
}

inline std::vector<double> times_from_json(const json& j, const char* ctx) {
    if (!j.is_array() || j.empty())
        throw config_error(std::string(ctx) + ": 'times' must be a nonempty array");
    std::vector<double> t;
    for (const auto& v : j) {
        if (!v.is_number())
            throw config_error(std::string(ctx) + ": time entries must be numbers");
        t.push_back(v.get<double>());
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < 0.0)
            throw config_error(std::string(ctx) + ": times must be nonnegative");
        if (i > 0 && !(t[i] > t[i - 1]))
            throw config_error(std::string(ctx) + ": time grid must be strictly increasing");
    }
    return t;
}

inline std::vector<long> states_from_json(const json& section, const BirthDeathSpec& spec,
                                          const char* ctx) {
    std::vector<long> states;
    if (section.contains("states")) {
        const json& arr = section.at("states");
        if (!arr.is_array() || arr.empty())
            throw config_error(std::string(ctx) + ": 'states' must be a nonempty array");
        for (const auto& v : arr) {
            if (!v.is_number_integer())
                throw config_error(std::string(ctx) + ": state entries must be integers");
            states.push_back(v.get<long>());
        }
    } else {
        long top = spec.finite_state() ? spec.upper_state() : 25;
        if (section.contains("max_state")) top = detail::need_int(section, "max_state", ctx);
        for (long x = 0; x <= top; ++x) states.push_back(x);
    }
    for (long x : states)
        if (!spec.in_state_space(x))
            throw config_error(std::string(ctx) + ": state " + std::to_string(x) +
                               " outside the state space");
    return states;
}

// Initial datum for the solve command.
inline std::function<double(long)> datum_from_json(const json& j, const BirthDeathSpec& spec) {
    if (!j.is_object()) throw config_error("solve: 'datum' must be an object");
    const std::string type = detail::need(j, "type", "solve.datum").get<std::string>();
    if (type == "point") {
        const long state = detail::need_int(j, "state", "solve.datum");
        if (!spec.in_state_space(state))
            throw config_error("solve.datum: point state outside the state space");
        return [state](long x) { return x == state ? 1.0 : 0.0; };
    }
    if (type == "constant") {
        const double c = detail::need_num(j, "value", "solve.datum");
        return [c](long) { return c; };
    }
    if (type == "invariant") {
        BirthDeathSpec copy = spec;
        return [copy](long x) { return copy.invariant_mass(x); };
    }
    if (type == "identity")
        return [](long x) { return static_cast<double>(x); };
    if (type == "table") {
        const json& arr = detail::need(j, "values", "solve.datum");
        if (!arr.is_array() || arr.empty())
            throw config_error("solve.datum: 'values' must be a nonempty array");
        std::vector<double> v;
        for (const auto& e : arr) {
            if (!e.is_number())
                throw config_error("solve.datum: table entries must be numbers");
            v.push_back(e.get<double>());
        }
        return [v](long x) {
            return (x >= 0 && static_cast<std::size_t>(x) < v.size())
                       ? v[static_cast<std::size_t>(x)]
                       : 0.0;
        };
    }
    throw config_error("solve.datum: unknown type '" + type + "'");
}

namespace detail {

inline std::string out_path(const json& cfg, const Overrides& ov, const char* fallback) {
    if (ov.out) return *ov.out;
    if (cfg.contains("out")) {
        const json& o = cfg.at("out");
        if (!o.is_string()) throw config_error("top level: 'out' must be a string path");
        return o.get<std::string>();
    }
    return fallback;
}

inline std::uint64_t need_seed(const json& section, const Overrides& ov, const char* ctx) {
    if (ov.seed) return *ov.seed;
    if (section.contains("seed")) {
        const json& s = section.at("seed");
        if (!s.is_number_unsigned() && !s.is_number_integer())
            throw config_error(std::string(ctx) + ": 'seed' must be an integer");
        return s.get<std::uint64_t>();
    }
    throw config_error(std::string(ctx) +
                       ": a seed is required (config field 'seed' or flag --seed)");
}

inline void write_sidecar(const std::string& csv_path, const json& sidecar) {
    write_text_file(csv_path + ".json", sidecar.dump(2) + "\n");
}

}  // namespace detail

inline int cmd_solve(const json& cfg, const Overrides& ov) {
    const BirthDeathSpec spec = process_from_json(detail::need(cfg, "process", "top level"));
    const BernsteinFunction fn = bernstein_from_json(detail::need(cfg, "bernstein", "top level"));
    const json& sc = detail::need(cfg, "solve", "top level");
    const std::string kind = detail::need(sc, "kind", "solve").get<std::string>();
    double tol = ov.tol ? *ov.tol : (sc.contains("tol") ? detail::need_num(sc, "tol", "solve") : 1e-8);
    if (!(tol > 0.0)) throw config_error("solve: tolerance must be positive");
    const std::vector<double> times = times_from_json(detail::need(sc, "times", "solve"), "solve");
    const std::vector<long> states = states_from_json(sc, spec, "solve");
    const std::string path = detail::out_path(cfg, ov, "solve.csv");

    EigenEvaluator ev(fn);
    std::optional<SpectralSolution> sol;
    const char* value_col = nullptr;
    const char* state_col = nullptr;
    if (kind == "backward") {
        sol = SpectralSolution::backward(spec, ev, datum_from_json(detail::need(sc, "datum", "solve"), spec), tol);
        value_col = "u";
        state_col = "y";
    } else if (kind == "forward") {
        sol = SpectralSolution::forward(spec, ev, datum_from_json(detail::need(sc, "datum", "solve"), spec), tol);
        value_col = "v";
        state_col = "x";
    } else if (kind == "fundamental") {
        sol = SpectralSolution::fundamental(spec, ev, detail::need_int(sc, "source", "solve"), tol);
        value_col = "p";
        state_col = "x";
    } else {
        throw config_error("solve: 'kind' must be backward, forward, or fundamental");
    }

    // The library returns raw series values; negative truncation artifacts in
    // the probability-type outputs are clamped in this display layer only,
    // and the raw minimum is recorded in the sidecar.
    const bool clamp = kind != "backward";
    double max_tail = 0.0;
    double min_raw = 0.0;
    std::ostringstream csv;
    csv << "t," << state_col << ',' << value_col << ",tail_bound\n";
    for (double t : times)
        for (long x : states) {
            const SeriesValue v = sol->evaluate(t, x);
            max_tail = std::max(max_tail, v.tail_bound);
            min_raw = std::min(min_raw, v.value);
            const double shown = clamp ? std::max(v.value, 0.0) : v.value;
            csv << g17(t) << ',' << x << ',' << g17(shown) << ',' << g17(v.tail_bound) << '\n';
        }
    write_text_file(path, csv.str());

    json sidecar;
    sidecar["command"] = "solve";
    sidecar["config"] = cfg;
    sidecar["csv"] = path;
    sidecar["tolerance"] = tol;
    sidecar["max_tail_bound"] = max_tail;
    sidecar["min_raw_value"] = min_raw;
    sidecar["series_cap"] = sol->truncation();
    sidecar["cap_tail_bound"] = sol->tail_bound();
    detail::write_sidecar(path, sidecar);
    return 0;
}

inline int cmd_simulate(const json& cfg, const Overrides& ov) {
    const BirthDeathSpec spec = process_from_json(detail::need(cfg, "process", "top level"));
    const BernsteinFunction fn = bernstein_from_json(detail::need(cfg, "bernstein", "top level"));
    const json& sc = detail::need(cfg, "simulate", "top level");
    const std::vector<double> times = times_from_json(detail::need(sc, "times", "simulate"), "simulate");
    const std::uint64_t seed = detail::need_seed(sc, ov, "simulate");
    long samples = ov.samples ? *ov.samples
                              : (sc.contains("samples") ? detail::need_int(sc, "samples", "simulate")
                                                        : 100000);
    if (samples <= 0) throw config_error("simulate: 'samples' must be positive");

    std::optional<long> y0;
    bool stationary = false;
    const json& start = detail::need(sc, "y0", "simulate");
    if (start.is_string() && start.get<std::string>() == "stationary") {
        stationary = true;
    } else if (start.is_number_integer()) {
        y0 = start.get<long>();
        if (!spec.in_state_space(*y0))
            throw config_error("simulate: y0 outside the state space");
    } else {
        throw config_error("simulate: 'y0' must be an integer state or \"stationary\"");
    }
    const bool compare = sc.contains("compare") ? sc.at("compare").get<bool>() : true;
    const std::string path = detail::out_path(cfg, ov, "simulate.csv");

    const auto ensemble = simulate_ensemble(spec, fn, y0, times, samples, seed);

    std::ostringstream csv;
    csv << "sample_id,t,state\n";
    for (long i = 0; i < samples; ++i)
        for (std::size_t k = 0; k < times.size(); ++k)
            csv << i << ',' << g17(times[k]) << ','
                << ensemble[static_cast<std::size_t>(i)][k] << '\n';
    write_text_file(path, csv.str());

    json summary;
    summary["command"] = "simulate";
    summary["config"] = cfg;
    summary["csv"] = path;
    summary["seed"] = seed;
    summary["samples"] = samples;
    summary["marginals"] = json::array();

    std::optional<SpectralSolution> sol;
    if (compare && !stationary) {
        EigenEvaluator ev(fn);
        sol = SpectralSolution::fundamental(spec, ev, *y0, 1e-8);
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<long> draws(static_cast<std::size_t>(samples));
        for (long i = 0; i < samples; ++i)
            draws[static_cast<std::size_t>(i)] = ensemble[static_cast<std::size_t>(i)][k];
        const std::vector<double> pmf = empirical_pmf(draws);
        json entry;
        entry["t"] = times[k];
        entry["pmf"] = pmf;
        if (compare) {
            // total variation against the model marginal: spectral kernel
            // column for a point start, invariant distribution otherwise
            NeumaierSum acc;
            double model_cum = 0.0;
            const long emp_top = static_cast<long>(pmf.size()) - 1;
            const long hard_top =
                spec.finite_state() ? spec.upper_state() : emp_top + 2000;
            for (long x = 0; x <= hard_top; ++x) {
                const double model =
                    stationary ? spec.invariant_mass(x) : sol->evaluate(times[k], x).value;
                const double emp =
                    x <= emp_top ? pmf[static_cast<std::size_t>(x)] : 0.0;
                model_cum += model;
                acc.add(std::abs(emp - model));
                // Entries carry ~1e-8 certificates, so the running mass never
                // reaches 1 exactly; stop once the column is spent or decayed
                // to noise and charge the unvisited remainder below.
                if (x > emp_top && (model_cum > 1.0 - 1e-9 || model < 1e-12)) break;
            }
            acc.add(std::max(0.0, 1.0 - model_cum));
            entry["tv_vs_model"] = 0.5 * acc.value();
        }
        summary["marginals"].push_back(entry);
    }
    detail::write_sidecar(path, summary);
    return 0;
}

inline int cmd_covariance(const json& cfg, const Overrides& ov) {
    const BirthDeathSpec spec = process_from_json(detail::need(cfg, "process", "top level"));
    const BernsteinFunction fn = bernstein_from_json(detail::need(cfg, "bernstein", "top level"));
    const json& sc = detail::need(cfg, "covariance", "top level");
    const json& pairs = detail::need(sc, "pairs", "covariance");
    if (!pairs.is_array() || pairs.empty())
        throw config_error("covariance: 'pairs' must be a nonempty array of [t, s] pairs");
    const bool mc = sc.contains("mc") ? sc.at("mc").get<bool>() : true;
    long samples = ov.samples ? *ov.samples
                              : (sc.contains("samples")
                                     ? detail::need_int(sc, "samples", "covariance")
                                     : 10000);
    std::uint64_t seed = 0;
    if (mc) seed = detail::need_seed(sc, ov, "covariance");
    const std::string path = detail::out_path(cfg, ov, "covariance.csv");

    std::ostringstream csv;
    csv << "t,s,cov_exact,cov_mc,se\n";
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const json& p = pairs[k];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw config_error("covariance: each pair must be [t, s] with numeric entries");
        const double t = p[0].get<double>();
        const double s = p[1].get<double>();
        if (t < 0.0 || s < 0.0) throw config_error("covariance: times must be nonnegative");
        const double exact = covariance(spec, fn, t, s);
        double est = std::numeric_limits<double>::quiet_NaN();
        double se = std::numeric_limits<double>::quiet_NaN();
        if (mc) {
            // per-pair seed offset keeps the pair estimates independent
            const std::uint64_t pair_seed = seed ^ (0x9E3779B97F4A7C15ULL * (k + 1));
            const CovarianceEstimate e = mc_covariance(spec, fn, t, s, samples, pair_seed);
            est = e.value;
            se = e.std_error;
        }
        csv << g17(t) << ',' << g17(s) << ',' << g17(exact) << ',' << g17(est) << ','
            << g17(se) << '\n';
    }
    write_text_file(path, csv.str());

    const DependenceVerdict v = dependence_class(spec, fn);
    json sidecar;
    sidecar["command"] = "covariance";
    sidecar["config"] = cfg;
    sidecar["csv"] = path;
    if (mc) {
        sidecar["seed"] = seed;
        sidecar["samples"] = samples;
    }
    sidecar["dependence"] = {
        {"analytic_class", v.analytic == DependenceClass::LongRange ? "long-range" : "short-range"},
        {"analytic_order", v.analytic_order},
        {"numeric_class", v.numeric == DependenceClass::LongRange ? "long-range" : "short-range"},
        {"fitted_order", v.fitted_order},
        {"partial_sums_converge", v.partial_sums_converge},
        {"tail_fraction", v.tail_fraction},
        {"agree", v.agree},
        {"diagnostic", v.diagnostic},
    };
    detail::write_sidecar(path, sidecar);
    return 0;
}

inline int cmd_classify(const json& cfg, const Overrides& ov) {
    const BirthDeathSpec spec = process_from_json(detail::need(cfg, "process", "top level"));
    const BernsteinFunction fn = bernstein_from_json(detail::need(cfg, "bernstein", "top level"));
    const DependenceVerdict v = dependence_class(spec, fn);
    const std::string path = detail::out_path(cfg, ov, "classify.json");
    json out;
    out["command"] = "classify";
    out["config"] = cfg;
    out["analytic"] = {
        {"class", v.analytic == DependenceClass::LongRange ? "long-range" : "short-range"},
        {"order", v.analytic_order},
    };
    out["numeric"] = {
        {"class", v.numeric == DependenceClass::LongRange ? "long-range" : "short-range"},
        {"fitted_order", v.fitted_order},
        {"partial_sums_converge", v.partial_sums_converge},
        {"tail_fraction", v.tail_fraction},
    };
    out["agree"] = v.agree;
    out["diagnostic"] = v.diagnostic;
    write_text_file(path, out.dump(2) + "\n");
    return 0;
}

inline int cmd_selftest() {
    int failures = 0;
    auto report = [&failures](const char* name, bool ok, double measured, double limit) {
        std::printf("[%s] %-42s measured %.3g  limit %.3g\n", ok ? "PASS" : "FAIL", name,
                    measured, limit);
        if (!ok) ++failures;
    };

    {
        double worst = 0.0;
        const BirthDeathSpec specs[] = {
            BirthDeathSpec::immigration_death(1.0, 1.0),
            BirthDeathSpec::meixner(0.5, 1.0, 1.0),
            BirthDeathSpec::krawtchouk(10, 1.0, 1.0),
            BirthDeathSpec::hahn(8, 1.0, 2.0, 1.0),
        };
        for (const auto& s : specs) {
            const long top = s.finite_state() ? s.upper_state() : 200;
            for (long x = 0; x <= top; ++x) {
                const double up = s.in_state_space(x + 1)
                                      ? s.death(x + 1) * s.invariant_mass(x + 1)
                                      : 0.0;
                const double scale = std::max(
                    1e-300, std::abs(up) + std::abs(s.birth(x) * s.invariant_mass(x)));
                worst = std::max(worst, std::abs(s.pearson_residual(x)) / scale);
            }
        }
        report("invariant-measure detailed balance", worst <= 1e-12, worst, 1e-12);
    }
    {
        double worst = 0.0;
        const auto spec = BirthDeathSpec::immigration_death(1.0, 1.0);
        for (long n = 0; n <= 8; ++n)
            for (long x = 0; x <= 8; ++x)
                worst = std::max(worst, spec.poly().duality_defect(n, x));
        report("polynomial duality", worst <= 1e-9, worst, 1e-9);
    }
    {
        const double err1 = std::abs(mittag_leffler(1.0, -1.0) - std::exp(-1.0));
        const double err2 = std::abs(mittag_leffler(0.5, -1.0) - 0.42758357615580700441);
        const double worst = std::max(err1, err2);
        report("Mittag-Leffler reference values", worst <= 1e-10, worst, 1e-10);
    }
    {
        const auto st = BernsteinFunction::stable(0.5);
        const EigenEvaluator ml(st, EigenMethod::MittagLeffler);
        const EigenEvaluator li(st, EigenMethod::LaplaceInversion);
        const double a = ml.eigenfunction(1.0, -1.0);
        const double b = li.eigenfunction(1.0, -1.0);
        report("eigenfunction dual-route agreement", std::abs(a - b) <= 1e-6, std::abs(a - b),
               1e-6);
    }
    {
        const auto idphi =
            BernsteinFunction::custom([](std::complex<double> z) { return z; });
        const EigenEvaluator ev(idphi);
        const double err = std::abs(ev.eigenfunction(1.0, -1.0) - std::exp(-1.0));
        report("classical reduction of the eigenfunction", err <= 1e-8, err, 1e-8);
    }
    {
        const auto spec = BirthDeathSpec::immigration_death(1.0, 1.0);
        const EigenEvaluator ev(BernsteinFunction::stable(0.5));
        const auto sol = SpectralSolution::fundamental(spec, ev, 0, 1e-9);
        NeumaierSum acc;
        for (long x = 0; x <= 40; ++x) acc.add(sol.evaluate(1.0, x).value);
        const double err = std::abs(acc.value() - 1.0);
        report("kernel column mass", err <= 1e-6, err, 1e-6);
    }
    std::printf("%s\n", failures == 0 ? "selftest: all checks passed"
                                      : "selftest: FAILURES detected");
    return failures == 0 ? 0 : 1;
}

// Entry point shared with tests. argv semantics match the installed binary.
inline int run(const std::string& command, const std::optional<std::string>& config_path,
               const Overrides& ov) {
    if (command == "selftest") return cmd_selftest();
    const json cfg = load_config(config_path);
    if (!cfg.is_object()) throw config_error("top level: config must be a JSON object");
    if (command == "solve") return cmd_solve(cfg, ov);
    if (command == "simulate") return cmd_simulate(cfg, ov);
    if (command == "covariance") return cmd_covariance(cfg, ov);
    if (command == "classify") return cmd_classify(cfg, ov);
    throw config_error("unknown command '" + command + "'");
}

}  // namespace nlbd::cli
