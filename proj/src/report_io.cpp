#include "flowlab/report_io.hpp"

#include "flowlab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace flowlab
{
    std::string formatDouble(double v)
    {
        if (std::isnan(v)) return "nan";
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    void writeFunctionalCsv(std::ostream& out, const FunctionalReport& report)
    {
        out << "scenario,t,delta,Q,psi,rhs,C_emp\n";
        for (const auto& r : report.rows)
        {
            out << r.scenario << ',' << formatDouble(r.t) << ',' << formatDouble(r.delta) << ',' << formatDouble(r.Q)
                << ',' << formatDouble(r.psi) << ',' << formatDouble(r.rhs) << ',' << formatDouble(r.Cemp) << '\n';
        }
    }

    nlohmann::json functionalJson(const FunctionalReport& report)
    {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : report.rows)
        {
            rows.push_back({{"scenario", r.scenario},
                            {"t", r.t},
                            {"delta", r.delta},
                            {"Q", r.Q},
                            {"psi", r.psi},
                            {"growth", r.growth},
                            {"rhs", r.rhs},
                            {"C_emp", r.Cemp}});
        }
        return {{"scenario", report.scenario},
                {"bound", report.form == BoundForm::W11 ? "w11" : "2d"},
                {"h", report.h},
                {"dt", report.dt},
                {"base", report.base},
                {"weight_integral", report.weightIntegral},
                {"rows", rows}};
    }

    nlohmann::json compressJson(const std::string& scenario, const IncompressibilityReport& report)
    {
        nlohmann::json violations = nlohmann::json::array();
        for (const auto& v : report.violations) violations.push_back({{"node", v.node}, {"t", v.t}, {"J", v.J}});
        return {{"scenario", scenario},
                {"C", report.C},
                {"pass", report.pass},
                {"worst_ratio", report.worstRatio},
                {"evaluated", report.evaluated},
                {"violations", violations}};
    }

    void writeFlowGridCsv(std::ostream& out, const FlowGrid& grid, const std::vector<double>& times)
    {
        const int d = grid.dim();
        out << "node";
        for (int i = 0; i < d; ++i) out << ",x" << i;
        out << ",t";
        for (int i = 0; i < d; ++i) out << ",X" << i;
        out << ",events\n";
        std::vector<int> samples;
        for (double t : times) samples.push_back(grid.sampleIndex(t));
        for (std::size_t node : grid.primaryNodes())
        {
            const Trajectory& traj = grid.trajectory(node);
            for (std::size_t j = 0; j < times.size(); ++j)
            {
                out << node;
                for (int i = 0; i < d; ++i) out << ',' << formatDouble(traj.initial[i]);
                out << ',' << formatDouble(times[j]);
                const Point x = traj.position(samples[j]);
                for (int i = 0; i < d; ++i) out << ',' << formatDouble(x[i]);
                out << ',' << traj.eventsUpTo(times[j]) << '\n';
            }
        }
    }

    void writeText(const std::string& path, const std::string& text)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw InputError("cannot open '" + path + "' for writing");
        out << text;
        if (!out) throw InputError("failed writing '" + path + "'");
    }
} // namespace flowlab
