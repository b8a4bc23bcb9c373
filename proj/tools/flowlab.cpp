// flowlab: run experiments, verify acceptance suites, list scenarios.
#include "flowlab/acceptance.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/experiment.hpp"
#include "flowlab/scenarios.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    enum ExitCode
    {
        Success = 0,
        VerificationFailure = 1,
        ConfigFailure = 2,
        CapacityFailure = 3
    };

    std::string readFile(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw flowlab::ConfigError("cannot read config '" + path + "'");
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Flows of BV vector fields: compactness functionals and acceptance checks"};
    app.require_subcommand(1);

    std::string configPath;
    std::string outDir;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::vector<std::string> overrides;
    auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
    run->add_option("--config", configPath, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", outDir, "Output directory (overrides config 'output')");
    run->add_option("--seed", seed, "Seed for sampled checks");
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--override", overrides, "key.path=value, repeatable");

    std::string suite = "all";
    int verifyWorkers = 1;
    auto* verify = app.add_subcommand("verify", "Run an acceptance suite");
    verify->add_option("suite", suite, "Suite name")->check(CLI::IsMember(flowlab::suiteNames()));
    verify->add_option("--workers", verifyWorkers, "Worker threads")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("list-scenarios", "Print the scenario catalog");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? Success : ConfigFailure;
    }

    try
    {
        if (*list)
        {
            std::cout << flowlab::listScenarios();
            return Success;
        }
        if (*verify)
        {
            bool pass = true;
            flowlab::AcceptanceOptions options;
            options.workers = verifyWorkers;
            flowlab::runSuite(suite, options, [&](const flowlab::CriterionResult& r) {
                std::cout << flowlab::formatResult(r) << std::endl;
                pass = pass && r.pass;
            });
            return pass ? Success : VerificationFailure;
        }

        nlohmann::json json = flowlab::parseConfigText(readFile(configPath), configPath);
        for (const auto& o : overrides) flowlab::applyOverride(json, o);
        if (!outDir.empty()) json["output"] = outDir;
        if (seed) json["seed"] = *seed;
        if (workers) json["workers"] = *workers;
        const auto config = flowlab::ExperimentConfig::fromJson(json);
        const auto summary = flowlab::runExperiment(config);
        for (const auto& f : summary.files) std::cout << f << '\n';
        return Success;
    }
    catch (const flowlab::CapacityError& e)
    {
        std::cerr << "capacity error: " << e.what() << '\n';
        return CapacityFailure;
    }
    catch (const flowlab::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return ConfigFailure;
    }
    catch (const flowlab::CatalogError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return ConfigFailure;
    }
    catch (const flowlab::InputError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return ConfigFailure;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return VerificationFailure;
    }
}
