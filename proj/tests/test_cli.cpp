#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

// End-to-end checks of the installed command-line binary. The test runner
// exports NLBD_CLI_BIN; every case shells out to that binary with its own
// config files and output paths inside a scratch directory.

namespace {

using nlohmann::json;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string cli_binary() {
    const char* bin = std::getenv("NLBD_CLI_BIN");
    REQUIRE(bin != nullptr);
    return bin;
}

std::string scratch_dir() {
    static std::string dir = [] {
        char tmpl[] = "/tmp/nlbd_cli_XXXXXX";
        char* d = mkdtemp(tmpl);
        REQUIRE(d != nullptr);
        return std::string(d);
    }();
    return dir;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    REQUIRE(out.good());
}

// run `nlbd <args>` with optional stdin redirection and environment prefix
RunResult run_cli(const std::string& args, const std::string& stdin_path = "",
                  const std::string& env_prefix = "") {
    static int counter = 0;
    const std::string tag = scratch_dir() + "/io" + std::to_string(counter++);
    std::string cmd = env_prefix + " \"" + cli_binary() + "\" " + args;
    if (!stdin_path.empty()) cmd += " < \"" + stdin_path + "\"";
    cmd += " > \"" + tag + ".out\" 2> \"" + tag + ".err\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(tag + ".out");
    r.err = read_file(tag + ".err");
    return r;
}

std::string cfg_path(const std::string& name, const json& cfg) {
    const std::string path = scratch_dir() + "/" + name;
    write_file(path, cfg.dump(2) + "\n");
    return path;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        FAIL("column not found: " << name);
        return 0;
    }
};

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
        } else {
            t.rows.push_back(cells);
        }
    }
    return t;
}

double poisson_mass(double rho, long x) {
    return std::exp(-rho + x * std::log(rho) - std::lgamma(x + 1.0));
}

json base_config() {
    return json{{"process", {{"family", "immigration-death"}, {"b", 1.0}, {"d", 1.0}}},
                {"bernstein", {{"family", "stable"}, {"alpha", 0.5}}}};
}

}  // namespace

TEST_CASE("selftest command") {
    const auto r = run_cli("selftest");
    INFO(r.out << r.err);
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("[PASS]") != std::string::npos);
    REQUIRE(r.out.find("[FAIL]") == std::string::npos);
}

TEST_CASE("solve command") {
    SECTION("backward run with a constant datum") {
        json cfg = base_config();
        cfg["solve"] = {{"kind", "backward"},
                        {"datum", {{"type", "constant"}, {"value", 1.0}}},
                        {"times", {0.5, 1.0}},
                        {"max_state", 6}};
        const std::string out = scratch_dir() + "/back.csv";
        const auto r = run_cli("solve --config " + cfg_path("back.json", cfg) + " --out " + out);
        INFO(r.err);
        REQUIRE(r.exit_code == 0);
        const auto csv = parse_csv(read_file(out));
        REQUIRE(csv.header == std::vector<std::string>{"t", "y", "u", "tail_bound"});
        REQUIRE(csv.rows.size() == 14);
        for (const auto& row : csv.rows)
            REQUIRE(std::stod(row[csv.col("u")]) == Catch::Approx(1.0).margin(1e-12));
        const json side = json::parse(read_file(out + ".json"));
        REQUIRE(side.at("command") == "solve");
        REQUIRE(side.at("tolerance").get<double>() == 1e-8);
        REQUIRE(side.at("max_tail_bound").get<double>() <= 1e-8);
    }
    SECTION("forward run from the invariant measure") {
        json cfg = base_config();
        cfg["solve"] = {{"kind", "forward"},
                        {"datum", {{"type", "invariant"}}},
                        {"times", {0.5}},
                        {"max_state", 10}};
        const std::string out = scratch_dir() + "/fwd.csv";
        const auto r = run_cli("solve --config " + cfg_path("fwd.json", cfg) + " --out " + out);
        REQUIRE(r.exit_code == 0);
        const auto csv = parse_csv(read_file(out));
        REQUIRE(csv.header[2] == "v");
        for (const auto& row : csv.rows) {
            const long x = std::stol(row[csv.col("x")]);
            const double v = std::stod(row[csv.col("v")]);
            // absolute floor: masses below the solve tolerance may round to 0
            REQUIRE(v == Catch::Approx(poisson_mass(1.0, x)).epsilon(1e-10).margin(2e-8));
        }
    }
    SECTION("forward run from a point mass reaches the invariant measure") {
        json cfg = base_config();
        cfg["solve"] = {{"kind", "forward"},
                        {"datum", {{"type", "point"}, {"state", 0}}},
                        {"times", {400000.0}},
                        {"max_state", 8}};
        const std::string out = scratch_dir() + "/relax.csv";
        const auto r = run_cli("solve --config " + cfg_path("relax.json", cfg) + " --out " + out);
        REQUIRE(r.exit_code == 0);
        const auto csv = parse_csv(read_file(out));
        for (const auto& row : csv.rows) {
            const long x = std::stol(row[csv.col("x")]);
            const double v = std::stod(row[csv.col("v")]);
            REQUIRE(v == Catch::Approx(poisson_mass(1.0, x)).margin(2e-3));
        }
    }
    SECTION("fundamental run at time zero is a point mass") {
        json cfg = base_config();
        cfg["solve"] = {{"kind", "fundamental"}, {"source", 2}, {"times", {0.0}},
                        {"max_state", 6}};
        const std::string out = scratch_dir() + "/fund.csv";
        const auto r = run_cli("solve --config " + cfg_path("fund.json", cfg) + " --out " + out);
        REQUIRE(r.exit_code == 0);
        const auto csv = parse_csv(read_file(out));
        REQUIRE(csv.header[2] == "p");
        for (const auto& row : csv.rows) {
            const long x = std::stol(row[csv.col("x")]);
            const double p = std::stod(row[csv.col("p")]);
            REQUIRE(p == Catch::Approx(x == 2 ? 1.0 : 0.0).margin(1e-8));
        }
    }
    SECTION("fundamental run on a finite-state family") {
        json cfg{{"process",
                  {{"family", "hahn"}, {"N", 6}, {"alpha", 1}, {"beta", 2}, {"d", 1.0}}},
                 {"bernstein", {{"kind", "gamma"}}}};
        // no states field: a finite family defaults to its whole state space
        cfg["solve"] = {{"kind", "fundamental"}, {"source", 3}, {"times", {0.0, 0.5}}};
        const std::string out = scratch_dir() + "/hahn.csv";
        const auto r = run_cli("solve --config " + cfg_path("hahn.json", cfg) + " --out " + out);
        INFO(r.err);
        REQUIRE(r.exit_code == 0);
        const auto csv = parse_csv(read_file(out));
        REQUIRE(csv.rows.size() == 14);
        double mass = 0.0;
        for (const auto& row : csv.rows) {
            const double t = std::stod(row[csv.col("t")]);
            const long x = std::stol(row[csv.col("x")]);
            const double p = std::stod(row[csv.col("p")]);
            if (t == 0.0) REQUIRE(p == Catch::Approx(x == 3 ? 1.0 : 0.0).margin(1e-8));
            else mass += p;
        }
        REQUIRE(mass == Catch::Approx(1.0).margin(1e-6));
    }
}

TEST_CASE("simulate command") {
    json cfg{{"process", {{"family", "krawtchouk"}, {"N", 5}, {"b", 1.0}, {"d", 1.0}}},
             {"bernstein", {{"kind", "gamma"}}},
             {"simulate",
              {{"times", {0.0, 0.75}}, {"y0", 1}, {"seed", 424242}, {"samples", 40000}}}};
    const std::string config = cfg_path("sim.json", cfg);
    SECTION("deterministic output and agreement with the series solution") {
        const std::string out1 = scratch_dir() + "/sim1.csv";
        const std::string out2 = scratch_dir() + "/sim2.csv";
        const auto r1 = run_cli("simulate --config " + config + " --out " + out1);
        const auto r2 = run_cli("simulate --config " + config + " --out " + out2);
        INFO(r1.err);
        REQUIRE(r1.exit_code == 0);
        REQUIRE(r2.exit_code == 0);
        REQUIRE(read_file(out1) == read_file(out2));

        const auto csv = parse_csv(read_file(out1));
        REQUIRE(csv.header == std::vector<std::string>{"sample_id", "t", "state"});
        for (const auto& row : csv.rows)
            if (std::stod(row[1]) == 0.0) REQUIRE(row[2] == "1");

        const json side = json::parse(read_file(out1 + ".json"));
        REQUIRE(side.at("samples").get<long>() == 40000);
        for (const auto& marg : side.at("marginals"))
            REQUIRE(marg.at("tv_vs_model").get<double>() < 0.02);
    }
    SECTION("model comparison works on an infinite state space") {
        json icfg = base_config();
        icfg["simulate"] = {{"times", {1.0}}, {"y0", 0}, {"seed", 5150}, {"samples", 20000}};
        const std::string out = scratch_dir() + "/sim_inf.csv";
        const auto r =
            run_cli("simulate --config " + cfg_path("sim_inf.json", icfg) + " --out " + out);
        INFO(r.err);
        REQUIRE(r.exit_code == 0);
        const json side = json::parse(read_file(out + ".json"));
        REQUIRE(side.at("marginals")[0].at("tv_vs_model").get<double>() < 0.02);
    }
    SECTION("worker count does not change the bytes") {
        const std::string out1 = scratch_dir() + "/sim_t1.csv";
        const std::string out4 = scratch_dir() + "/sim_t4.csv";
        const auto r1 =
            run_cli("simulate --config " + config + " --out " + out1, "", "NLBD_THREADS=1");
        const auto r4 =
            run_cli("simulate --config " + config + " --out " + out4, "", "NLBD_THREADS=4");
        REQUIRE(r1.exit_code == 0);
        REQUIRE(r4.exit_code == 0);
        REQUIRE(read_file(out1) == read_file(out4));
    }
}

TEST_CASE("covariance command") {
    SECTION("exact column, Monte Carlo agreement, dependence sidecar") {
        json cfg = base_config();
        cfg["covariance"] = {{"pairs", {{0.0, 0.0}, {1.0, 0.0}, {2.0, 1.0}}},
                             {"samples", 4000},
                             {"seed", 9}};
        const std::string out = scratch_dir() + "/cov.csv";
        const auto r = run_cli("covariance --config " + cfg_path("cov.json", cfg) + " --out " + out);
        INFO(r.err);
        REQUIRE(r.exit_code == 0);
        const auto csv = parse_csv(read_file(out));
        REQUIRE(csv.header ==
                std::vector<std::string>{"t", "s", "cov_exact", "cov_mc", "se"});
        REQUIRE(std::stod(csv.rows[0][csv.col("cov_exact")]) ==
                Catch::Approx(1.0).margin(1e-12));
        for (const auto& row : csv.rows) {
            const double exact = std::stod(row[csv.col("cov_exact")]);
            const double mc = std::stod(row[csv.col("cov_mc")]);
            const double se = std::stod(row[csv.col("se")]);
            REQUIRE(se > 0.0);
            REQUIRE(std::abs(exact - mc) <= 3.0 * se + 0.01);
        }
        const json side = json::parse(read_file(out + ".json"));
        REQUIRE(side.at("dependence").at("analytic_class") == "long-range");
        REQUIRE(side.at("dependence").at("agree").get<bool>());
    }
    SECTION("exact-only mode needs no seed") {
        json cfg = base_config();
        cfg["covariance"] = {{"pairs", {{1.0, 0.5}}}, {"mc", false}};
        const std::string out = scratch_dir() + "/cov_exact.csv";
        const auto r =
            run_cli("covariance --config " + cfg_path("cove.json", cfg) + " --out " + out);
        REQUIRE(r.exit_code == 0);
        const auto csv = parse_csv(read_file(out));
        REQUIRE(csv.rows.size() == 1);
        REQUIRE(csv.rows[0][csv.col("cov_mc")] == "nan");
    }
}

TEST_CASE("classify command") {
    SECTION("stable clock is long-range") {
        json cfg = base_config();
        const std::string out = scratch_dir() + "/cls_long.json";
        const auto r = run_cli("classify --config " + cfg_path("clsl.json", cfg) + " --out " + out);
        REQUIRE(r.exit_code == 0);
        const json v = json::parse(read_file(out));
        REQUIRE(v.at("analytic").at("class") == "long-range");
        REQUIRE(v.at("numeric").at("class") == "long-range");
        REQUIRE(v.at("agree").get<bool>());
    }
    SECTION("gamma clock is short-range") {
        json cfg = base_config();
        cfg["bernstein"] = {{"family", "gamma"}};
        const std::string out = scratch_dir() + "/cls_short.json";
        const auto r = run_cli("classify --config " + cfg_path("clss.json", cfg) + " --out " + out);
        REQUIRE(r.exit_code == 0);
        const json v = json::parse(read_file(out));
        REQUIRE(v.at("analytic").at("class") == "short-range");
        REQUIRE(v.at("numeric").at("tail_fraction").get<double>() < 1e-6);
        REQUIRE(v.at("agree").get<bool>());
    }
}

TEST_CASE("flag overrides and stdin config") {
    SECTION("tolerance and output overrides") {
        json cfg = base_config();
        cfg["solve"] = {{"kind", "fundamental"}, {"source", 0}, {"times", {0.5}},
                        {"max_state", 4}};
        const std::string out = scratch_dir() + "/tol.csv";
        const auto r = run_cli("solve --config " + cfg_path("tol.json", cfg) +
                               " --tol 1e-4 --out " + out);
        REQUIRE(r.exit_code == 0);
        const json side = json::parse(read_file(out + ".json"));
        REQUIRE(side.at("tolerance").get<double>() == 1e-4);
    }
    SECTION("config on standard input") {
        json cfg = base_config();
        cfg["solve"] = {{"kind", "backward"},
                        {"datum", {{"type", "constant"}, {"value", 1.0}}},
                        {"times", {1.0}},
                        {"max_state", 3}};
        const std::string out = scratch_dir() + "/stdin.csv";
        const auto r = run_cli("solve --out " + out, cfg_path("stdin.json", cfg));
        INFO(r.err);
        REQUIRE(r.exit_code == 0);
        REQUIRE(parse_csv(read_file(out)).rows.size() == 4);
    }
    SECTION("seed and sample overrides reach the sidecar") {
        json cfg = base_config();
        cfg["covariance"] = {{"pairs", {{0.5, 0.0}}}};
        const std::string out = scratch_dir() + "/ovr.csv";
        const auto r = run_cli("covariance --config " + cfg_path("ovr.json", cfg) +
                               " --seed 17 --samples 500 --out " + out);
        REQUIRE(r.exit_code == 0);
        const json side = json::parse(read_file(out + ".json"));
        REQUIRE(side.at("seed").get<long>() == 17);
        REQUIRE(side.at("samples").get<long>() == 500);
    }
}

TEST_CASE("failure modes") {
    SECTION("malformed JSON") {
        const std::string bad = scratch_dir() + "/bad.json";
        write_file(bad, "{ nope\n");
        const auto r = run_cli("solve --config " + bad);
        REQUIRE(r.exit_code == 2);
        const json err = json::parse(r.err);
        REQUIRE(err.at("error") == "config");
    }
    SECTION("unknown process family") {
        json cfg = base_config();
        cfg["process"]["family"] = "widget";
        cfg["solve"] = {{"kind", "fundamental"}, {"source", 0}, {"times", {1.0}}};
        const auto r = run_cli("solve --config " + cfg_path("widget.json", cfg));
        REQUIRE(r.exit_code == 2);
        REQUIRE(json::parse(r.err).at("error") == "config");
    }
    SECTION("missing command section") {
        const auto r = run_cli("solve --config " + cfg_path("empty.json", base_config()));
        REQUIRE(r.exit_code == 2);
        REQUIRE(json::parse(r.err).at("error") == "config");
    }
    SECTION("fractional Hahn shape parameters are rejected") {
        json cfg{{"process",
                  {{"family", "hahn"}, {"N", 6}, {"alpha", 1.5}, {"beta", 2}, {"d", 1.0}}},
                 {"bernstein", {{"kind", "gamma"}}},
                 {"solve", {{"kind", "fundamental"}, {"source", 0}, {"times", {1.0}}}}};
        const auto r = run_cli("solve --config " + cfg_path("hahn_frac.json", cfg));
        REQUIRE(r.exit_code == 2);
        const json err = json::parse(r.err);
        REQUIRE(err.at("error") == "config");
        REQUIRE(err.at("detail").get<std::string>().find("alpha") != std::string::npos);
    }
    SECTION("simulation without a seed") {
        json cfg = base_config();
        cfg["simulate"] = {{"times", {1.0}}, {"y0", 0}, {"samples", 200}};
        const auto r = run_cli("simulate --config " + cfg_path("noseed.json", cfg));
        REQUIRE(r.exit_code == 2);
        const json err = json::parse(r.err);
        REQUIRE(err.at("error") == "config");
        REQUIRE(err.at("detail").get<std::string>().find("seed") != std::string::npos);
    }
    SECTION("unknown subcommand") {
        const auto r = run_cli("frobnicate");
        REQUIRE(r.exit_code == 2);
        REQUIRE(json::parse(r.err).at("error") == "usage");
    }
    SECTION("unattainable tolerance reports a numerical failure") {
        json cfg = base_config();
        cfg["solve"] = {{"kind", "fundamental"}, {"source", 0}, {"times", {0.5}},
                        {"max_state", 2}};
        const auto r = run_cli("solve --config " + cfg_path("hard.json", cfg) +
                               " --tol 1e-300 --out " + scratch_dir() + "/hard.csv");
        REQUIRE(r.exit_code == 3);
        REQUIRE(json::parse(r.err).at("error") == "numerical");
    }
}
