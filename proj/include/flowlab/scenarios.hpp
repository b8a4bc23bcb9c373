#pragma once

#include "flowlab/domain.hpp"
#include "flowlab/fields.hpp"
#include "flowlab/types.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace flowlab
{
    using Params = nlohmann::json;

    /// Closed-form flow X(t, x).
    using FlowFormula = std::function<Point(double t, const Point& x)>;

    struct ScenarioFacts
    {
        /// Constant of 1/C ≤ JX ≤ C, valid for t ≤ horizon.
        std::optional<double> C;
        double horizon = 1.0;
        /// Lipschitz constant of b for smooth scenarios.
        std::optional<double> lipschitz;
        std::optional<FlowFormula> exactFlow;
        /// Q_δ(t) in closed form, where known.
        std::optional<std::function<double(double t, double delta)>> exactQ;
        /// "w11", "2d", "log-lower" or empty.
        std::string boundForm;
        /// Shift used by map-only scenarios.
        std::optional<double> delta;
        std::string notes;
    };

    struct ScenarioFlags
    {
        bool driftFlag = false;
        bool nearlyIncompressible = false;
        bool hasJump = false;
        bool smooth = false;
        bool mapOnly = false;
    };

    /// Immutable catalog entry with its ground truth.
    struct ScenarioSpec
    {
        std::string name;
        Params params;
        Domain domain;
        std::optional<VectorField> field;
        /// Map-only scenarios: X(x); t is ignored.
        std::optional<FlowFormula> explicitMap;
        ScenarioFacts facts;
        ScenarioFlags flags;
        double defaultH = 1.0 / 64.0;
        double defaultDt = 1.0 / 64.0;
    };

    struct ParamSchema
    {
        std::string name;
        std::string type;
        std::string fallback;
    };

    struct CatalogEntry
    {
        std::string name;
        std::vector<ParamSchema> params;
        std::string summary;
    };

    const std::vector<CatalogEntry>& catalog();

    /// "name p:type=default ..." per entry.
    std::string listScenarios();

    /// Throws CatalogError for unknown names, unknown or malformed parameters and
    /// drift fields outside b₁ ∈ [1, 2], ‖b‖ ≤ 2.
    ScenarioSpec build(const std::string& name, const Params& params = Params::object());

    /// Solutions of x' = √|x| started at x: identical up to 2√|x| for x < 0, then
    /// resting at 0 until t0 and leaving as ((t - t0)/2)². t0 = ∞ freezes the
    /// trajectory; t0 = 2√|x| is the invertible branch.
    double sqrtBranch(double t, double x, double t0);

    /// The invertible branch: (√x + t/2)² for x ≥ 0, the leave-immediately branch for x < 0.
    double sqrtFlow(double t, double x);
} // namespace flowlab
