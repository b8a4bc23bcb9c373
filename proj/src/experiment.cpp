#include "flowlab/experiment.hpp"

#include "flowlab/errors.hpp"
#include "flowlab/flow.hpp"
#include "flowlab/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

namespace flowlab
{
    namespace
    {
        using nlohmann::json;

        [[noreturn]] void fail(const std::string& field, const std::string& what)
        {
            throw ConfigError("config field '" + field + "': " + what);
        }

        void checkKeys(const json& j, const std::string& where, const std::set<std::string>& allowed)
        {
            if (!j.is_object()) fail(where, "must be an object");
            for (const auto& [key, value] : j.items())
            {
                if (!allowed.contains(key)) fail(where.empty() ? key : where + "." + key, "unknown key");
            }
        }

        double positive(const json& j, const std::string& field)
        {
            if (!j.is_number() || !(j.get<double>() > 0.0) || !std::isfinite(j.get<double>()))
                fail(field, "must be a positive number");
            return j.get<double>();
        }

        long long integer(const json& j, const std::string& field, long long minimum)
        {
            if (!j.is_number_integer() || j.get<long long>() < minimum)
                fail(field, "must be an integer >= " + std::to_string(minimum));
            return j.get<long long>();
        }

        std::vector<double> numberList(const json& j, const std::string& field, bool allowZero)
        {
            if (!j.is_array()) fail(field, "must be a list of numbers");
            std::vector<double> out;
            for (std::size_t i = 0; i < j.size(); ++i)
            {
                const std::string name = field + "[" + std::to_string(i) + "]";
                if (!j[i].is_number()) fail(name, "must be a number");
                const double v = j[i].get<double>();
                if (!std::isfinite(v) || v < 0.0 || (!allowZero && v == 0.0))
                    fail(name, allowZero ? "must be nonnegative" : "must be positive");
                out.push_back(v);
            }
            return out;
        }

        bool onLattice(double value, double h)
        {
            const double q = value / h;
            return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
        }
    } // namespace

    std::vector<double> ExperimentConfig::resolvedTimes() const
    {
        return times.empty() ? std::vector<double>{0.0, T} : times;
    }

    std::vector<double> ExperimentConfig::resolvedDeltas() const
    {
        return deltas.empty() ? std::vector<double>{h} : deltas;
    }

    json ExperimentConfig::toJson() const
    {
        json j = {{"scenario", {{"name", scenario}, {"params", params}}},
                  {"grid", {{"h", h}, {"halo", halo}}},
                  {"time", {{"T", T}, {"dt", dt}, {"samples", resolvedTimes()}, {"record_stride", recordStride}}},
                  {"deltas", resolvedDeltas()},
                  {"phi", {{"kind", phiKind}, {"p", phiExponent}}},
                  {"eps_factors", epsFactors},
                  {"output", output},
                  {"seed", seed},
                  {"workers", workers},
                  {"node_budget", nodeBudget},
                  {"write_flowgrid", writeFlowGrid}};
        if (deltaAxis) j["delta_axis"] = *deltaAxis;
        if (C) j["C"] = *C;
        if (mollify) j["mollify"] = *mollify;
        return j;
    }

    ExperimentConfig ExperimentConfig::fromJson(const json& j)
    {
        checkKeys(j, "",
                  {"scenario", "grid", "time", "deltas", "delta_axis", "phi", "eps_factors", "C", "mollify", "output",
                   "seed", "workers", "node_budget", "write_flowgrid"});
        ExperimentConfig c;
        if (!j.contains("scenario")) fail("scenario", "missing");
        const json& s = j.at("scenario");
        if (s.is_string())
        {
            c.scenario = s.get<std::string>();
        }
        else
        {
            checkKeys(s, "scenario", {"name", "params"});
            if (!s.contains("name") || !s.at("name").is_string()) fail("scenario.name", "must be a string");
            c.scenario = s.at("name").get<std::string>();
            if (s.contains("params"))
            {
                if (!s.at("params").is_object()) fail("scenario.params", "must be an object");
                c.params = s.at("params");
            }
        }

        if (j.contains("grid"))
        {
            const json& g = j.at("grid");
            checkKeys(g, "grid", {"h", "halo"});
            if (g.contains("h")) c.h = positive(g.at("h"), "grid.h");
            if (g.contains("halo")) c.halo = static_cast<int>(integer(g.at("halo"), "grid.halo", 0));
        }
        if (j.contains("time"))
        {
            const json& t = j.at("time");
            checkKeys(t, "time", {"T", "dt", "samples", "record_stride"});
            if (t.contains("T")) c.T = positive(t.at("T"), "time.T");
            if (t.contains("dt")) c.dt = positive(t.at("dt"), "time.dt");
            if (t.contains("samples")) c.times = numberList(t.at("samples"), "time.samples", true);
            if (t.contains("record_stride"))
                c.recordStride = static_cast<int>(integer(t.at("record_stride"), "time.record_stride", 1));
        }
        if (c.dt > c.T) fail("time.dt", "must not exceed time.T");
        for (std::size_t i = 0; i < c.times.size(); ++i)
        {
            if (c.times[i] > c.T * (1.0 + 1e-12)) fail("time.samples[" + std::to_string(i) + "]", "exceeds time.T");
        }
        if (j.contains("deltas")) c.deltas = numberList(j.at("deltas"), "deltas", false);
        for (std::size_t i = 0; i < c.deltas.size(); ++i)
        {
            if (!onLattice(c.deltas[i], c.h))
                fail("deltas[" + std::to_string(i) + "]", "not a multiple of grid.h");
        }
        if (j.contains("delta_axis")) c.deltaAxis = static_cast<int>(integer(j.at("delta_axis"), "delta_axis", 0));
        if (j.contains("phi"))
        {
            const json& p = j.at("phi");
            checkKeys(p, "phi", {"kind", "p"});
            if (p.contains("kind"))
            {
                if (!p.at("kind").is_string()) fail("phi.kind", "must be a string");
                c.phiKind = p.at("kind").get<std::string>();
                if (c.phiKind != "power" && c.phiKind != "entropic") fail("phi.kind", "must be 'power' or 'entropic'");
            }
            if (p.contains("p")) c.phiExponent = positive(p.at("p"), "phi.p");
        }
        if (j.contains("eps_factors")) c.epsFactors = numberList(j.at("eps_factors"), "eps_factors", false);
        if (j.contains("C"))
        {
            c.C = positive(j.at("C"), "C");
            if (*c.C < 1.0) fail("C", "must be at least 1");
        }
        if (j.contains("mollify")) c.mollify = static_cast<int>(integer(j.at("mollify"), "mollify", 1));
        if (j.contains("output"))
        {
            if (!j.at("output").is_string()) fail("output", "must be a string");
            c.output = j.at("output").get<std::string>();
        }
        if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(integer(j.at("seed"), "seed", 0));
        if (j.contains("workers")) c.workers = static_cast<int>(integer(j.at("workers"), "workers", 1));
        if (j.contains("node_budget"))
            c.nodeBudget = static_cast<std::size_t>(integer(j.at("node_budget"), "node_budget", 1));
        if (j.contains("write_flowgrid"))
        {
            if (!j.at("write_flowgrid").is_boolean()) fail("write_flowgrid", "must be true or false");
            c.writeFlowGrid = j.at("write_flowgrid").get<bool>();
        }
        return c;
    }

    json parseConfigText(const std::string& text, const std::string& origin)
    {
        try
        {
            return json::parse(text);
        }
        catch (const json::parse_error& e)
        {
            const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
            const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
            throw ConfigError(origin + ": parse error at line " + std::to_string(line) + ": " + e.what());
        }
    }

    void applyOverride(json& config, const std::string& assignment)
    {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
        const std::string key = assignment.substr(0, eq);
        const std::string text = assignment.substr(eq + 1);
        json value;
        try
        {
            value = json::parse(text);
        }
        catch (const json::parse_error&)
        {
            value = text;
        }
        json* node = &config;
        std::stringstream path(key);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(path, part, '.'))
        {
            if (part.empty()) throw ConfigError("override '" + assignment + "': empty key segment");
            parts.push_back(part);
        }
        for (std::size_t i = 0; i + 1 < parts.size(); ++i)
        {
            if (node->contains(parts[i]) && !(*node)[parts[i]].is_object())
            {
                // "scenario": "name" widens to {"name": ...} so that scenario.params.x works.
                if (parts[i] == "scenario" && (*node)[parts[i]].is_string())
                    (*node)[parts[i]] = json{{"name", (*node)[parts[i]]}};
                else
                    throw ConfigError("override '" + assignment + "': '" + parts[i] + "' is not a section");
            }
            node = &(*node)[parts[i]];
        }
        (*node)[parts.back()] = value;
    }

    ExperimentSummary runExperiment(const ExperimentConfig& config)
    {
        namespace fs = std::filesystem;
        const ScenarioSpec spec = build(config.scenario, config.params);
        std::error_code ec;
        fs::create_directories(config.output, ec);
        if (ec) throw ConfigError("config field 'output': cannot create '" + config.output + "': " + ec.message());
        const fs::path out(config.output);

        ExperimentSummary summary;
        json resolved = config.toJson();
        resolved["scenario"]["params"] = spec.params;
        writeText((out / "config.json").string(), resolved.dump(2) + "\n");
        summary.files.push_back((out / "config.json").string());

        if (spec.flags.mapOnly)
        {
            const int n = spec.params.at("n").get<int>();
            std::ostringstream csv;
            csv << "scenario,n,delta,value,identity_value\n"
                << spec.name << ',' << n << ',' << formatDouble(*spec.facts.delta) << ','
                << formatDouble(bianchiniGap(n)) << ',' << formatDouble(bianchiniGap(n, true)) << '\n';
            writeText((out / "swap.csv").string(), csv.str());
            summary.files.push_back((out / "swap.csv").string());
            return summary;
        }

        const VectorField field = config.mollify ? MollifiedField(*spec.field, *config.mollify).field() : *spec.field;
        const int d = spec.domain.dim();
        const int axis = config.deltaAxis.value_or(d - 1);
        if (axis >= d) throw ConfigError("config field 'delta_axis': exceeds the scenario dimension");
        const auto times = config.resolvedTimes();
        const auto deltas = config.resolvedDeltas();
        auto shift = [&](double length) {
            Point p = Point::Zero(d);
            p[axis] = length;
            return p;
        };

        FlowGridOptions go;
        go.halo = config.halo;
        go.recordStride = config.recordStride;
        go.workers = config.workers;
        go.nodeBudget = config.nodeBudget;
        const double largest = *std::max_element(deltas.begin(), deltas.end());
        const FlowGrid grid = flowGrid(field, spec.domain, config.h, config.T, config.dt, shift(largest), go);

        if (config.writeFlowGrid)
        {
            std::ostringstream csv;
            writeFlowGridCsv(csv, grid, times);
            writeText((out / "flowgrid.csv").string(), csv.str());
            summary.files.push_back((out / "flowgrid.csv").string());
        }

        std::vector<Point> shifts;
        for (double delta : deltas) shifts.push_back(shift(delta));
        const PhiSpec phi = config.phiKind == "entropic" ? PhiSpec::entropic() : PhiSpec::power(config.phiExponent);
        const bool twoD = spec.facts.boundForm == "2d" || spec.flags.hasJump;
        const double weight = twoD ? totalVariation(field)
                                   : integrateDensity(field, [&](double xi) { return 1.0 + phi(xi); }, d == 1 ? 4096 : 256);
        summary.functionals = functionalReport(grid, spec.name, twoD ? BoundForm::TwoD : BoundForm::W11, times, shifts,
                                               phi, weight);
        {
            std::ostringstream csv;
            writeFunctionalCsv(csv, summary.functionals);
            writeText((out / "functionals.csv").string(), csv.str());
            summary.files.push_back((out / "functionals.csv").string());
        }

        for (double delta : deltas)
        {
            for (double factor : config.epsFactors)
            {
                const auto omega = exceptionalSet(grid.withShift(shift(delta)), factor * delta);
                summary.exceptional.push_back(
                    {{"delta", delta}, {"eps", omega.eps}, {"count", omega.count}, {"measure", omega.measure}});
            }
        }
        json functionals = functionalJson(summary.functionals);
        functionals["exceptional_sets"] = summary.exceptional;
        functionals["config"] = resolved;
        writeText((out / "functionals.json").string(), functionals.dump(2) + "\n");
        summary.files.push_back((out / "functionals.json").string());

        const std::optional<double> C = config.C ? config.C : spec.facts.C;
        json compress;
        if (C && config.halo >= 1)
        {
            JacobianEstimate all;
            for (double t : times)
            {
                if (t == 0.0) continue;
                auto part = jacobianFd(grid, t, config.workers);
                all.entries.insert(all.entries.end(), part.entries.begin(), part.entries.end());
            }
            summary.compress = incompressibilityCheck(all, *C);
            compress = compressJson(spec.name, *summary.compress);
        }
        else
        {
            compress = {{"scenario", spec.name},
                        {"C", C ? json(*C) : json(nullptr)},
                        {"pass", nullptr},
                        {"worst_ratio", nullptr},
                        {"violations", json::array()},
                        {"note", C ? "grid.halo must be at least 1 for finite differences" : "no declared C"}};
        }
        if (spec.flags.hasJump && spec.field->jumpSet())
        {
            const auto trace = traceSignCheck(*spec.field, *spec.field->jumpSet(), 64, config.seed);
            compress["trace_sign"] = {{"all_same_sign", trace.allSameSign}, {"min_ratio", trace.minRatio}};
        }
        writeText((out / "compress.json").string(), compress.dump(2) + "\n");
        summary.files.push_back((out / "compress.json").string());
        return summary;
    }
} // namespace flowlab
