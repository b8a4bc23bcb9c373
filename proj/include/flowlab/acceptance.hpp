#pragma once

#include <functional>
#include <string>
#include <vector>

namespace flowlab
{
    struct CriterionResult
    {
        int id = 0; ///< 0 for checks outside the numbered list
        std::string suite;
        bool pass = false;
        std::string detail;
        double seconds = 0.0;
    };

    struct AcceptanceOptions
    {
        int workers = 1;
    };

    /// Suite names accepted by runSuite, "all" last.
    const std::vector<std::string>& suiteNames();

    /// Runs the named suite; `onResult` sees each line as soon as it is ready.
    /// Throws InputError for unknown names.
    std::vector<CriterionResult> runSuite(const std::string& name, const AcceptanceOptions& options,
                                          const std::function<void(const CriterionResult&)>& onResult = {});

    /// "[PASS] 3 sqrt-selection (1.2 s): detail".
    std::string formatResult(const CriterionResult& result);
} // namespace flowlab
