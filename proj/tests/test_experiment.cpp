#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lqm/experiment.hpp"
#include "lqm/linalg.hpp"

using namespace lqm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("lqmlab_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LQM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("config parsing: fields, defaults, failure modes") {
    const ExperimentConfig cfg =
        config_from_json(json{{"experiment", "decohere"}, {"seed", 7}, {"threads", 2}});
    CHECK(cfg.experiment == "decohere");
    CHECK(cfg.seed == 7);
    CHECK(cfg.seed_set);
    CHECK(cfg.threads == 2);
    CHECK(cfg.output_dir == "out");

    CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"seed", 1}}), ConfigError); // no experiment
    CHECK_THROWS_AS(config_from_json(json{{"experiment", "warp"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"experiment", "epr"}, {"threads", 0}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"experiment", "epr"}}, "decohere"), ConfigError);
    // Subcommand fills a missing experiment.
    CHECK(config_from_json(json::object(), "limits").experiment == "limits");
}

TEST_CASE("decohere: interference column follows the power law") {
    ExperimentConfig cfg = config_from_json(
        json{{"experiment", "decohere"}, {"overlap", 0.5}, {"n_min", 1}, {"n_max", 20}});
    const ExperimentRecord rec = run_experiment(cfg);
    REQUIRE(rec.columns == std::vector<std::string>{"N", "interference"});
    REQUIRE(rec.rows.size() == 20);
    for (const auto& row : rec.rows) {
        const double n = row[0];
        CHECK(row[1] == doctest::Approx(std::pow(0.5, n)).epsilon(1e-12));
    }
    CHECK(rec.metrics.at("dense_symbolic_max_diff").get<double>() <= 1e-12);
    CHECK(rec.metrics.at("mixture_deviation").get<double>() <=
          rec.metrics.at("mixture_bound").get<double>() + 1e-10);
}

TEST_CASE("nosignal: summary max_delta stays at rounding level") {
    ExperimentConfig cfg = config_from_json(
        json{{"experiment", "nosignal"}, {"seed", 11}, {"samples", 50}, {"n_sites", 6},
             {"probe_region", {{"sites", {4, 5}}, {"t", {0, 0}}}}});
    const ExperimentRecord rec = run_experiment(cfg);
    CHECK(rec.rows.size() == 50);
    CHECK(rec.metrics.at("max_delta").get<double>() <= 1e-12);
    CHECK(rec.metrics.at("locality_residual").get<double>() == 0.0);

    // Default geometry: the 8-site chain with probe site 5.
    const ExperimentRecord dflt =
        run_experiment(config_from_json(json{{"experiment", "nosignal"}, {"seed", 1}}));
    CHECK(dflt.rows.size() == 1000);
    CHECK(dflt.metrics.at("max_delta").get<double>() <= 1e-12);

    // Inconsistent region layout is a config error.
    CHECK_THROWS_AS(run_experiment(config_from_json(
                        json{{"experiment", "nosignal"}, {"seed", 1},
                             {"apparatus_sites", {3}}})),
                    ConfigError);

    // Thread count never changes the rows.
    json jt{{"experiment", "nosignal"}, {"seed", 11}, {"samples", 64}, {"n_sites", 6},
            {"probe_region", {{"sites", {4, 5}}, {"t", {0, 0}}}}};
    const ExperimentRecord serial = run_experiment(config_from_json(jt));
    jt["threads"] = 2;
    const ExperimentRecord threaded = run_experiment(config_from_json(jt));
    CHECK(serial.rows == threaded.rows);
}

TEST_CASE("seeded experiments demand a seed; empty grids are named") {
    CHECK_THROWS_AS(run_experiment(config_from_json(json{{"experiment", "epr"}})), ConfigError);
    CHECK_THROWS_AS(run_experiment(config_from_json(json{{"experiment", "nosignal"}})),
                    ConfigError);
    try {
        run_experiment(config_from_json(
            json{{"experiment", "decohere"}, {"n_min", 5}, {"n_max", 1}}));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("n_min") != std::string::npos);
    }
}

TEST_CASE("measure: fidelity endpoints and identity metrics") {
    const ExperimentRecord rec = run_experiment(config_from_json(
        json{{"experiment", "measure"}, {"seed", 3}, {"t_points", 5}, {"eq4_samples", 100}}));
    REQUIRE(rec.columns == std::vector<std::string>{"t", "fidelity"});
    REQUIRE(rec.rows.size() == 5);
    CHECK(rec.rows.back()[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rec.metrics.at("intertwiner_residual_free_off").get<double>() <= 1e-10);
    CHECK(rec.metrics.at("mixture_identity_max_deviation").get<double>() <= 1e-12);
    for (const auto& entry : rec.metrics.at("intertwiner_sweep"))
        CHECK(entry.at("residual").get<double>() <= entry.at("bound").get<double>());

    // Higher-dimensional system: same contracts.
    const ExperimentRecord qud = run_experiment(config_from_json(
        json{{"experiment", "measure"}, {"seed", 4}, {"system_dim", 3}, {"t_points", 3},
             {"eq4_samples", 50}}));
    CHECK(qud.rows.back()[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(qud.metrics.at("mixture_identity_max_deviation").get<double>() <= 1e-12);
}

TEST_CASE("epr: engine metrics and availability timeline") {
    const ExperimentRecord rec = run_experiment(
        config_from_json(json{{"experiment", "epr"}, {"seed", 99}, {"trials", 2000}}));
    REQUIRE(rec.columns == std::vector<std::string>{"trial", "alice_setting", "bob_setting",
                                                    "alice_outcome", "bob_outcome"});
    REQUIRE(rec.rows.size() == 2000);
    for (const auto& row : rec.rows) CHECK(std::abs(row[3] * row[4]) == 1.0);
    CHECK(rec.metrics.at("chsh").get<double>() ==
          doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-9));
    CHECK(rec.metrics.at("marginal_invariance_delta").get<double>() <= 1e-12);
    const auto& avail = rec.metrics.at("availability");
    CHECK_FALSE(avail.at("available_at_detection").get<bool>());
    CHECK(avail.at("earliest_time").get<std::int64_t>() == 15);
    CHECK(avail.at("timeline").back().at("available").get<bool>());
}

TEST_CASE("entangle: both constructions in one table") {
    const ExperimentRecord rec =
        run_experiment(config_from_json(json{{"experiment", "entangle"}}));
    REQUIRE(rec.rows.size() == 2);
    const auto col = [&](const std::string& name) {
        return std::distance(rec.columns.begin(),
                             std::find(rec.columns.begin(), rec.columns.end(), name));
    };
    for (const auto& row : rec.rows) {
        CHECK(row[static_cast<size_t>(col("ef"))] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(row[static_cast<size_t>(col("covariance"))] ==
              doctest::Approx(0.25).epsilon(1e-12));
        CHECK(row[static_cast<size_t>(col("entropy"))] ==
              doctest::Approx(std::log(2.0)).epsilon(1e-10));
        CHECK(row[static_cast<size_t>(col("schmidt_1"))] ==
              doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(row[static_cast<size_t>(col("locality_residual"))] == 0.0);
    }
}

TEST_CASE("limits: the three sweeps behave") {
    const ExperimentRecord rec = run_experiment(config_from_json(
        json{{"experiment", "limits"}, {"t_points", 5}, {"n_max", 12},
             {"apparatus_sizes", {1, 2, 3}}}));
    REQUIRE(rec.columns == std::vector<std::string>{"limit", "x", "value"});
    for (const auto& row : rec.rows) {
        if (row[0] == 1.0 && row[1] == 1.0) CHECK(row[2] == doctest::Approx(1.0).epsilon(1e-9));
        if (row[0] == 2.0)
            CHECK(row[2] == doctest::Approx(std::pow(0.5, row[1])).epsilon(1e-12));
        if (row[0] == 3.0) CHECK(row[2] <= 1e-12); // outside probes never move
    }
    for (const auto& entry : rec.metrics.at("apparatus_extent"))
        CHECK(entry.at("inside_delta").get<double>() > 0.1); // the coupling is visible inside
}

TEST_CASE("emit: format, byte determinism, round trip") {
    ExperimentConfig cfg = config_from_json(
        json{{"experiment", "decohere"}, {"overlap", 0.3}, {"n_min", 1}, {"n_max", 12}});
    const ExperimentRecord rec1 = run_experiment(cfg);
    const ExperimentRecord rec2 = run_experiment(cfg);

    const fs::path d1 = scratch_dir("emit1");
    const fs::path d2 = scratch_dir("emit2");
    emit_record(rec1, d1);
    emit_record(rec2, d2);
    const std::string csv1 = slurp(d1 / "results.csv");
    const std::string csv2 = slurp(d2 / "results.csv");
    CHECK(csv1 == csv2);
    CHECK(csv1.rfind("N,interference\n", 0) == 0);

    // Re-parse the CSV: every float must round-trip bit-exactly.
    std::istringstream lines(csv1);
    std::string line;
    std::getline(lines, line); // header
    size_t row = 0;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string cell;
        size_t col = 0;
        while (std::getline(cells, cell, ',')) {
            const double parsed = std::strtod(cell.c_str(), nullptr);
            CHECK(parsed == rec1.rows[row][col]);
            ++col;
        }
        CHECK(col == rec1.columns.size());
        ++row;
    }
    CHECK(row == rec1.rows.size());

    // summary.json round-trips and echoes the config.
    const json summary = json::parse(slurp(d1 / "summary.json"));
    CHECK(summary.at("experiment") == "decohere");
    CHECK(summary.at("params") == cfg.params);
    CHECK(summary.at("version").get<std::string>() == rec1.version);
    CHECK(summary.contains("metrics"));

    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("format_double: 17-significant-digit round trip") {
    for (const double x : {1.0, 0.1, 1.0 / 3.0, 9.765625e-4, 2.0 * std::sqrt(2.0), -0.0, 1e300}) {
        const std::string s = format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("cli: exit codes and output files") {
    const fs::path dir = scratch_dir("cli");
    const fs::path cfg_path = dir / "decohere.json";
    {
        std::ofstream out(cfg_path);
        out << json{{"experiment", "decohere"}, {"n_min", 1}, {"n_max", 8}}.dump();
    }
    const fs::path out_dir = dir / "run";
    CHECK(run_cli("decohere --config " + cfg_path.string() + " --out " + out_dir.string()) == 0);
    CHECK(fs::exists(out_dir / "results.csv"));
    CHECK(fs::exists(out_dir / "summary.json"));

    // Malformed config: nonzero exit, no output files.
    const fs::path bad_path = dir / "bad.json";
    {
        std::ofstream out(bad_path);
        out << json{{"experiment", "decohere"}, {"n_min", 9}, {"n_max", 2}}.dump();
    }
    const fs::path bad_out = dir / "bad_run";
    CHECK(run_cli("decohere --config " + bad_path.string() + " --out " + bad_out.string()) == 2);
    CHECK_FALSE(fs::exists(bad_out / "results.csv"));

    // Experiment/subcommand mismatch is a config error.
    CHECK(run_cli("epr --config " + cfg_path.string()) == 2);

    // Capacity overflow maps to exit 3.
    const fs::path cap_path = dir / "cap.json";
    {
        std::ofstream out(cap_path);
        out << json{{"experiment", "decohere"},
                    {"n_min", 1},
                    {"n_max", 3},
                    {"mixture", {{"n", 25}, {"k", 0}}}}
                   .dump();
    }
    CHECK(run_cli("decohere --config " + cap_path.string() + " --out " +
                  (dir / "cap_run").string()) == 3);

    fs::remove_all(dir);
}

TEST_CASE("cli: seed override keeps runs reproducible") {
    const fs::path dir = scratch_dir("cli_seed");
    const fs::path cfg_path = dir / "nosignal.json";
    {
        std::ofstream out(cfg_path);
        out << json{{"experiment", "nosignal"}, {"samples", 5}, {"n_sites", 6},
                    {"probe_region", {{"sites", {4}}, {"t", {0, 0}}}}}
                   .dump();
    }
    const fs::path o1 = dir / "a", o2 = dir / "b";
    CHECK(run_cli("nosignal --config " + cfg_path.string() + " --seed 9 --out " + o1.string()) ==
          0);
    CHECK(run_cli("nosignal --config " + cfg_path.string() + " --seed 9 --out " + o2.string()) ==
          0);
    CHECK(slurp(o1 / "results.csv") == slurp(o2 / "results.csv"));
    // Without any seed the run is rejected before touching the filesystem.
    CHECK(run_cli("nosignal --config " + cfg_path.string() + " --out " + (dir / "c").string()) ==
          2);
    fs::remove_all(dir);
}
