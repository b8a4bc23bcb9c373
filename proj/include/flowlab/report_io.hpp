#pragma once

#include "flowlab/compress.hpp"
#include "flowlab/flow.hpp"
#include "flowlab/functionals.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace flowlab
{
    /// 17 significant digits; "nan" and "inf" spelled out.
    std::string formatDouble(double v);

    /// Columns: scenario, t, delta, Q, psi, rhs, C_emp.
    void writeFunctionalCsv(std::ostream& out, const FunctionalReport& report);
    nlohmann::json functionalJson(const FunctionalReport& report);

    /// {scenario, C, pass, worst_ratio, violations: [{node, t, J}]}.
    nlohmann::json compressJson(const std::string& scenario, const IncompressibilityReport& report);

    /// Columns: node, x0.., t, X.., events; one row per primary node and time.
    void writeFlowGridCsv(std::ostream& out, const FlowGrid& grid, const std::vector<double>& times);

    /// Writes `text` to `path`, throwing InputError on failure.
    void writeText(const std::string& path, const std::string& text);
} // namespace flowlab
