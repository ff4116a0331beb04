// nlbd: spectral solver and simulator for subordinated birth-death processes.
//
//   nlbd solve      --config cfg.json [--tol T] [--out path.csv]
//   nlbd simulate   --config cfg.json [--seed S] [--samples N] [--out path.csv]
//   nlbd covariance --config cfg.json [--seed S] [--samples N] [--out path.csv]
//   nlbd classify   --config cfg.json [--out path.json]
//   nlbd selftest
//
// The config is JSON, read from --config or from stdin. Flags override the
// matching config fields. Errors are reported as one-line JSON on stderr.

#include <CLI11.hpp>

#include "nlbd/cli.hpp"

namespace {

int fail(const char* category, const std::string& detail, int code) {
    nlohmann::json err;
    err["error"] = category;
    err["detail"] = detail;
    std::fputs((err.dump() + "\n").c_str(), stderr);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral solver for time-changed birth-death processes"};
    app.require_subcommand(1);
    app.fallthrough();  // accept the global flags after the subcommand name too

    std::string config_path;
    std::uint64_t seed = 0;
    double tol = 0.0;
    long samples = 0;
    std::string out_path;

    app.add_option("--config", config_path, "path to a JSON config (default: stdin)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides config)");
    auto* tol_opt = app.add_option("--tol", tol, "solver tolerance (overrides config)");
    auto* samples_opt = app.add_option("--samples", samples, "sample count (overrides config)");
    auto* out_opt = app.add_option("--out", out_path, "output path (overrides config)");

    app.add_subcommand("solve", "evaluate a spectral solution on a grid");
    app.add_subcommand("simulate", "sample the time-changed process");
    app.add_subcommand("covariance", "exact and Monte Carlo covariance");
    app.add_subcommand("classify", "long- vs short-range dependence verdict");
    app.add_subcommand("selftest", "run built-in consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        return fail("usage", e.what(), 2);
    }

    nlbd::cli::Overrides ov;
    if (seed_opt->count() > 0) ov.seed = seed;
    if (tol_opt->count() > 0) ov.tol = tol;
    if (samples_opt->count() > 0) ov.samples = samples;
    if (out_opt->count() > 0) ov.out = out_path;

    const std::string command = app.get_subcommands().front()->get_name();
    std::optional<std::string> cfg_path;
    if (!config_path.empty()) cfg_path = config_path;

    try {
        return nlbd::cli::run(command, cfg_path, ov);
    } catch (const nlbd::cli::config_error& e) {
        return fail("config", e.what(), 2);
    } catch (const std::invalid_argument& e) {
        return fail("config", e.what(), 2);
    } catch (const nlbd::numerical_error& e) {
        return fail("numerical", e.what(), 3);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
}
