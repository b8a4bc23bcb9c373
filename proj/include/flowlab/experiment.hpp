#pragma once

#include "flowlab/compress.hpp"
#include "flowlab/functionals.hpp"
#include "flowlab/scenarios.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace flowlab
{
    /// Experiment description; see README for the JSON layout.
    struct ExperimentConfig
    {
        std::string scenario = "constant";
        Params params = Params::object();
        double h = 1.0 / 64.0;
        int halo = 1;
        double T = 1.0;
        double dt = 1.0 / 64.0;
        int recordStride = 1;
        std::vector<double> times;      ///< empty: {0, T}
        std::vector<double> deltas;     ///< shift lengths; empty: {h}
        std::optional<int> deltaAxis; ///< default: last axis
        std::string phiKind = "power";  ///< "power" or "entropic"
        double phiExponent = 1.5;
        std::vector<double> epsFactors{3.0}; ///< ε = factor · |δ|
        std::optional<double> C;
        std::optional<int> mollify;
        std::string output = "out";
        std::uint64_t seed = 1;
        int workers = 1;
        std::size_t nodeBudget = 10'000'000;
        bool writeFlowGrid = true;

        /// Resolved times/deltas with defaults filled in.
        std::vector<double> resolvedTimes() const;
        std::vector<double> resolvedDeltas() const;

        nlohmann::json toJson() const;
        /// Throws ConfigError naming the offending field.
        static ExperimentConfig fromJson(const nlohmann::json& j);
    };

    /// Parses JSON text; syntax errors report the line.
    nlohmann::json parseConfigText(const std::string& text, const std::string& origin = "config");

    /// Sets `a.b.c=value` in place; value is read as JSON, otherwise as a string.
    void applyOverride(nlohmann::json& config, const std::string& assignment);

    struct ExperimentSummary
    {
        std::vector<std::string> files;
        FunctionalReport functionals;
        std::optional<IncompressibilityReport> compress;
        nlohmann::json exceptional = nlohmann::json::array();
    };

    /// Builds the scenario, runs the flow grid and writes every report into config.output.
    ExperimentSummary runExperiment(const ExperimentConfig& config);
} // namespace flowlab
