#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flowlab/errors.hpp"
#include "flowlab/experiment.hpp"

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace flowlab;
namespace fs = std::filesystem;

namespace
{
    struct Outcome
    {
        int code = -1;
        std::string out;
    };

    Outcome runCli(const std::string& args)
    {
        const std::string command = std::string(FLOWLAB_CLI_PATH) + " " + args + " 2>&1";
        FILE* pipe = popen(command.c_str(), "r");
        REQUIRE(pipe != nullptr);
        Outcome o;
        char buf[4096];
        std::size_t n = 0;
        while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
        const int status = pclose(pipe);
        o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        return o;
    }

    std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path scratch(const std::string& name)
    {
        const fs::path dir = fs::temp_directory_path() / ("flowlab_cli_" + std::to_string(getpid())) / name;
        fs::remove_all(dir);
        fs::create_directories(dir);
        return dir;
    }

    fs::path writeConfig(const fs::path& dir, const std::string& text)
    {
        const fs::path p = dir / "config_in.json";
        std::ofstream(p) << text;
        return p;
    }

    // Q column of functionals.csv as (t, delta, Q).
    std::vector<std::array<double, 3>> qTable(const fs::path& csv)
    {
        std::ifstream in(csv);
        std::string line;
        std::getline(in, line);
        CHECK(line == "scenario,t,delta,Q,psi,rhs,C_emp");
        std::vector<std::array<double, 3>> rows;
        while (std::getline(in, line))
        {
            std::stringstream ss(line);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            REQUIRE(cells.size() == 7);
            rows.push_back({std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3])});
        }
        return rows;
    }
} // namespace

TEST_CASE("list-scenarios")
{
    const Outcome o = runCli("list-scenarios");
    CHECK(o.code == 0);
    CHECK(o.out.find("heaviside1d") != std::string::npos);
    CHECK(o.out.find("bianchini_swap n:int") != std::string::npos);
    CHECK(std::count(o.out.begin(), o.out.end(), '\n') == 11);
}

TEST_CASE("constant field gives the initial Q everywhere")
{
    const fs::path dir = scratch("constant");
    const fs::path cfg = writeConfig(dir, R"({"scenario": "constant", "grid": {"h": 0.01},
        "time": {"T": 1, "dt": 0.0625, "samples": [0, 0.5, 1]}, "deltas": [0.01, 0.05], "write_flowgrid": false})");
    const Outcome o = runCli("run --config " + cfg.string() + " --out " + (dir / "out").string());
    REQUIRE(o.code == 0);
    const auto rows = qTable(dir / "out" / "functionals.csv");
    CHECK(rows.size() == 6);
    for (const auto& r : rows) CHECK(std::abs(r[2] - 4.0 * std::log(2.0)) < 1e-9);
    CHECK_FALSE(fs::exists(dir / "out" / "flowgrid.csv"));
}

TEST_CASE("heaviside run passes the Jacobian check at C = 2")
{
    const fs::path dir = scratch("heaviside");
    const fs::path cfg = writeConfig(dir, R"({"scenario": "heaviside1d", "grid": {"h": 0.001},
        "time": {"T": 1, "dt": 0.015625}, "C": 2})");
    const Outcome o = runCli("run --config " + cfg.string() + " --out " + (dir / "out").string());
    REQUIRE(o.code == 0);
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "compress.json"));
    CHECK(report["pass"] == true);
    CHECK(report["C"] == 2.0);
    CHECK(report["worst_ratio"].get<double>() == doctest::Approx(0.5).epsilon(0.02));
    CHECK(fs::exists(dir / "out" / "flowgrid.csv"));
}

TEST_CASE("crossing field Q is uniform in delta")
{
    const fs::path dir = scratch("crossing");
    const fs::path cfg = writeConfig(dir, R"({"scenario": "crossing_jump2d", "grid": {"h": 0.0078125},
        "time": {"T": 1, "dt": 0.015625, "samples": [1]},
        "deltas": [0.0625, 0.03125, 0.015625, 0.0078125], "write_flowgrid": false, "workers": 4})");
    const Outcome o = runCli("run --config " + cfg.string() + " --out " + (dir / "out").string());
    REQUIRE(o.code == 0);
    double lo = INFINITY;
    double hi = -INFINITY;
    double sum = 0.0;
    const auto rows = qTable(dir / "out" / "functionals.csv");
    for (const auto& r : rows)
    {
        lo = std::min(lo, r[2]);
        hi = std::max(hi, r[2]);
        sum += r[2];
    }
    CHECK(hi - lo <= 0.2 * sum / static_cast<double>(rows.size()));
}

TEST_CASE("runs are deterministic and reproducible from the emitted config")
{
    const fs::path dir = scratch("determinism");
    const fs::path cfg = writeConfig(dir, R"({"scenario": {"name": "smooth_random", "params": {"seed": 4}},
        "grid": {"h": 0.0625, "halo": 1}, "time": {"T": 0.5, "dt": 0.03125}, "deltas": [0.0625, 0.125], "workers": 3})");
    REQUIRE(runCli("run --config " + cfg.string() + " --out " + (dir / "a").string()).code == 0);
    REQUIRE(runCli("run --config " + cfg.string() + " --out " + (dir / "b").string()).code == 0);
    REQUIRE(runCli("run --config " + (dir / "a" / "config.json").string() + " --out " + (dir / "c").string()).code == 0);
    for (const std::string file : {"functionals.csv", "flowgrid.csv", "compress.json"})
    {
        CHECK_MESSAGE(slurp(dir / "a" / file) == slurp(dir / "b" / file), file);
        CHECK_MESSAGE(slurp(dir / "a" / file) == slurp(dir / "c" / file), file);
    }
    // The embedded config differs only in the output directory.
    auto ja = nlohmann::json::parse(slurp(dir / "a" / "functionals.json"));
    auto jb = nlohmann::json::parse(slurp(dir / "b" / "functionals.json"));
    CHECK(ja["config"]["output"] != jb["config"]["output"]);
    ja["config"].erase("output");
    jb["config"].erase("output");
    CHECK(ja == jb);
}

TEST_CASE("overrides and flags reach the resolved config")
{
    const fs::path dir = scratch("override");
    const fs::path cfg = writeConfig(dir, R"({"scenario": "constant", "grid": {"h": 0.25}, "time": {"T": 0.5, "dt": 0.125}})");
    const Outcome o = runCli("run --config " + cfg.string() + " --out " + (dir / "out").string() +
                             " --override grid.h=0.125 --override scenario.params.v=[0,1] --seed 9");
    REQUIRE(o.code == 0);
    const auto resolved = nlohmann::json::parse(slurp(dir / "out" / "config.json"));
    CHECK(resolved["grid"]["h"] == 0.125);
    CHECK(resolved["scenario"]["params"]["v"] == nlohmann::json::array({0.0, 1.0}));
    CHECK(resolved["seed"] == 9);
}

TEST_CASE("bianchini run writes the swap table")
{
    const fs::path dir = scratch("bianchini");
    const fs::path cfg = writeConfig(dir, R"({"scenario": {"name": "bianchini_swap", "params": {"n": 4}}})");
    REQUIRE(runCli("run --config " + cfg.string() + " --out " + (dir / "out").string()).code == 0);
    CHECK(fs::exists(dir / "out" / "swap.csv"));
}

TEST_CASE("exit codes")
{
    const fs::path dir = scratch("errors");
    const auto run = [&](const std::string& text) {
        return runCli("run --config " + writeConfig(dir, text).string() + " --out " + (dir / "out").string());
    };

    Outcome o = run("{\"scenario\": \"constant\",\n \"grid\": {\"h\": }\n}");
    CHECK(o.code == 2);
    CHECK(o.out.find("line 2") != std::string::npos);

    o = run(R"({"scenario": "constant", "grid": {"h": 0.25, "spacing": 1}})");
    CHECK(o.code == 2);
    CHECK(o.out.find("grid.spacing") != std::string::npos);

    o = run(R"({"scenario": "constant", "grid": {"h": 0.25}, "deltas": [0.3]})");
    CHECK(o.code == 2);
    CHECK(o.out.find("deltas[0]") != std::string::npos);

    CHECK(run(R"({"scenario": "no_such_field"})").code == 2);
    CHECK(run(R"({"scenario": {"name": "crossing_jump2d", "params": {"b_minus": [3, 0]}}})").code == 2);
    CHECK(run(R"({"scenario": "constant", "grid": {"h": 0.001}, "node_budget": 1000})").code == 3);
    CHECK(runCli("verify no-such-suite").code == 2);
    CHECK(runCli("run").code == 2);
    CHECK(runCli("run --config " + (dir / "missing.json").string()).code == 2);
}

TEST_CASE("verify trivial")
{
    const Outcome o = runCli("verify trivial");
    CHECK(o.code == 0);
    CHECK(o.out.find("[PASS]") != std::string::npos);
    CHECK(o.out.find("[FAIL]") == std::string::npos);
}

TEST_CASE("config parsing")
{
    try
    {
        parseConfigText("{\n\"a\": 1,\n,\n}", "cfg.json");
        FAIL("accepted malformed JSON");
    }
    catch (const ConfigError& e)
    {
        CHECK(std::string(e.what()).find("cfg.json: parse error at line 3") != std::string::npos);
    }

    nlohmann::json j = {{"scenario", "constant"}};
    applyOverride(j, "time.T=2");
    applyOverride(j, "scenario.params.v=[1,1]");
    applyOverride(j, "output=results");
    CHECK(j["time"]["T"] == 2);
    CHECK(j["scenario"]["name"] == "constant");
    CHECK(j["output"] == "results");
    CHECK_THROWS_AS(applyOverride(j, "no-equals-sign"), ConfigError);

    const ExperimentConfig c = ExperimentConfig::fromJson(j);
    CHECK(c.T == 2.0);
    CHECK(c.resolvedTimes() == std::vector<double>{0.0, 2.0});
    CHECK(c.resolvedDeltas() == std::vector<double>{c.h});
    const ExperimentConfig again = ExperimentConfig::fromJson(c.toJson());
    CHECK(again.toJson() == c.toJson());

    CHECK_THROWS_AS(ExperimentConfig::fromJson({{"scenario", "constant"}, {"time", {{"T", 0.1}, {"dt", 0.5}}}}),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::fromJson({{"scenario", "constant"}, {"C", 0.5}}), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::fromJson({{"grid", {{"h", 0.1}}}}), ConfigError);
}

TEST_CASE("cleanup")
{
    fs::remove_all(fs::temp_directory_path() / ("flowlab_cli_" + std::to_string(getpid())));
}
