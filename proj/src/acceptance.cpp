#include "flowlab/acceptance.hpp"

#include "flowlab/compress.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/fields.hpp"
#include "flowlab/flow.hpp"
#include "flowlab/functionals.hpp"
#include "flowlab/random.hpp"
#include "flowlab/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace flowlab
{
    namespace
    {
        constexpr double kEventTolerance = 1e-12;

        std::string fmt(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6g", v);
            return buf;
        }

        Point axisShift(int dim, int axis, double length)
        {
            Point d = Point::Zero(dim);
            d[axis] = length;
            return d;
        }

        /// Collects sub-checks of one criterion into a single line.
        struct Checks
        {
            bool pass = true;
            std::ostringstream out;

            void add(bool ok, const std::string& text)
            {
                pass = pass && ok;
                if (out.tellp() > 0) out << "; ";
                out << text << (ok ? "" : " [FAILED]");
            }
        };

        using Criterion = CriterionResult (*)(const AcceptanceOptions&);

        // 1 ---------------------------------------------------------------------------

        CriterionResult qInitial(const AcceptanceOptions& opt)
        {
            Checks c;
            double worst = 0.0;
            std::string skipped;
            int evaluated = 0;
            for (const auto& entry : catalog())
            {
                const ScenarioSpec spec = build(entry.name);
                if (spec.flags.mapOnly)
                {
                    skipped += spec.name + " ";
                    continue;
                }
                const double h = spec.defaultH;
                const int d = spec.domain.dim();
                FlowGridOptions go;
                go.workers = opt.workers;
                const FlowGrid grid =
                    flowGrid(*spec.field, spec.domain, h, spec.defaultDt, spec.defaultDt, axisShift(d, d - 1, h), go);
                const double expected = spec.domain.measure() * std::numbers::ln2;
                const double err = std::abs(qDelta(grid, 0.0) - expected);
                worst = std::max(worst, err);
                ++evaluated;
                if (err > 1e-9) c.add(false, spec.name + " |Q - |Omega| log 2| = " + fmt(err));
            }
            c.add(worst <= 1e-9, std::to_string(evaluated) + " flow scenarios, max |Q_delta(0) - |Omega| log 2| = " +
                                     fmt(worst) + " (tol 1e-9)");
            if (!skipped.empty()) c.add(true, "map-only, no flow from the identity: " + skipped);
            return {1, "q-initial", c.pass, c.out.str()};
        }

        // 2 ---------------------------------------------------------------------------

        CriterionResult heaviside(const AcceptanceOptions& opt)
        {
            Checks c;
            const ScenarioSpec spec = build("heaviside1d");
            FlowGridOptions go;
            go.halo = 1;
            go.workers = opt.workers;
            const double T = 1.0;
            const FlowGrid grid = flowGrid(*spec.field, spec.domain, 1.0 / 256.0, T, 1.0 / 64.0, std::nullopt, go);
            double posErr = 0.0;
            for (std::size_t k : grid.primaryNodes())
            {
                const Point exact = (*spec.facts.exactFlow)(T, grid.node(k));
                posErr = std::max(posErr, (grid.trajectory(k).terminal() - exact).norm());
            }
            c.add(posErr <= 1e-6, "max terminal error " + fmt(posErr) + " (tol 1e-6)");

            const JacobianEstimate fd = jacobianFd(grid, T, opt.workers);
            int ok = 0;
            int near1 = 0;
            int nearHalf = 0;
            int other = 0;
            for (const auto& e : fd.entries)
            {
                if (e.status != NodeStatus::Ok) continue;
                ++ok;
                if (std::abs(e.J - 1.0) <= 0.02)
                    ++near1;
                else if (std::abs(e.J - 0.5) <= 0.01)
                    ++nearHalf;
                else
                    ++other;
            }
            c.add(other == 0 && near1 > 0 && nearHalf > 0,
                  "FD Jacobian: " + std::to_string(near1) + " nodes at 1, " + std::to_string(nearHalf) + " at 1/2, " +
                      std::to_string(other) + " elsewhere (of " + std::to_string(ok) + ")");
            const auto atTwo = incompressibilityCheck(fd, 2.0);
            const auto atOneHalf = incompressibilityCheck(fd, 1.5);
            c.add(atTwo.pass, "C = 2 passes");
            c.add(!atOneHalf.pass, "C = 1.5 fails (" + std::to_string(atOneHalf.violations.size()) + " violations)");
            return {2, "heaviside", c.pass, c.out.str()};
        }

        // 3 ---------------------------------------------------------------------------

        CriterionResult sqrtSelection(const AcceptanceOptions&)
        {
            Checks c;
            const ScenarioSpec spec = build("sqrt1d");
            const double target = sqrtFlow(4.0, -1.0);
            std::vector<double> errors;
            std::string trail;
            for (int n : {8, 16, 32, 64})
            {
                const Trajectory traj = integrate(MollifiedField(*spec.field, n), makePoint({-1.0}), 4.0, 1e-3);
                errors.push_back(std::abs(traj.terminal()[0] - target));
                trail += (trail.empty() ? "" : ", ") + std::string("n=") + std::to_string(n) + ": " + fmt(errors.back());
            }
            bool monotone = true;
            for (std::size_t i = 1; i < errors.size(); ++i) monotone = monotone && errors[i] < errors[i - 1];
            c.add(monotone, "|X_n(4,-1) - 1| decreasing (" + trail + ")");
            c.add(errors.back() <= 1e-2, "final error " + fmt(errors.back()) + " (tol 1e-2)");

            const double inf = std::numeric_limits<double>::infinity();
            const FlowMap1d frozen = [inf](double t, double x) { return sqrtBranch(t, x, inf); };
            const double image = intervalImageMeasure(frozen, {-1.0, 0.0}, 2.0);
            c.add(image <= 1e-6, "frozen branch |X(2,[-1,0])| = " + fmt(image) + " (tol 1e-6)");
            const FlowMap1d right = [](double t, double x) { return sqrtFlow(t, x); };
            const auto wcRight = weakCompressibility(right, {-1.0, 0.0}, 2.0, 4.0, 1.0 / 16.0);
            const auto wcFrozen = weakCompressibility(frozen, {-1.0, 0.0}, 2.0, 4.0, 1.0 / 16.0);
            c.add(wcRight.infimumRatio > 0.0 && wcFrozen.infimumRatio == 0.0,
                  "inf |X(2,I)|/|I| over |I| = 1/16: " + fmt(wcRight.infimumRatio) + " invertible, " +
                      fmt(wcFrozen.infimumRatio) + " frozen");
            return {3, "sqrt-selection", c.pass, c.out.str()};
        }

        // 4 ---------------------------------------------------------------------------

        CriterionResult bianchini(const AcceptanceOptions&)
        {
            Checks c;
            std::vector<double> ns;
            std::vector<double> values;
            for (int n : {8, 16, 32, 64, 128})
            {
                ns.push_back(n);
                values.push_back(bianchiniGap(n));
            }
            const LogFit fit = fitLogGrowth(ns, values);
            c.add(fit.slope >= 0.05, "slope c = " + fmt(fit.slope) + " (>= 0.05)");
            c.add(fit.rSquared >= 0.9, "R^2 = " + fmt(fit.rSquared) + " (>= 0.9)");
            c.add(true, "value(128) = " + fmt(values.back()) + ", identity map value(128) = " + fmt(bianchiniGap(128, true)));
            return {4, "bianchini", c.pass, c.out.str()};
        }

        // 5 and 6 share the sweep ----------------------------------------------------------

        std::vector<Point> deltaSweep(int dim, int axis)
        {
            std::vector<Point> out;
            for (int k = 4; k <= 9; ++k) out.push_back(axisShift(dim, axis, std::ldexp(1.0, -k)));
            return out;
        }

        // h = 2^-9 so that every shift of the sweep is a lattice vector; only t = 0 and t = 1 are kept.
        FlowGrid sweepGrid(const ScenarioSpec& spec, int axis, const AcceptanceOptions& opt)
        {
            FlowGridOptions go;
            go.workers = opt.workers;
            go.recordStride = 128;
            return flowGrid(*spec.field, spec.domain, std::ldexp(1.0, -9), 1.0, 1.0 / 128.0,
                            axisShift(spec.domain.dim(), axis, 1.0 / 16.0), go);
        }

        CriterionResult w11Bound(const AcceptanceOptions& opt)
        {
            Checks c;
            const ScenarioSpec spec = build("radial_alpha", {{"alpha", 0.5}, {"d", 2}});
            const PhiSpec phi = PhiSpec::power(1.5);
            const double weight = integrateDensity(*spec.field, [&](double xi) { return 1.0 + phi(xi); }, 512);
            const FlowGrid grid = sweepGrid(spec, 1, opt);
            const auto report = functionalReport(grid, spec.name, BoundForm::W11, {1.0}, deltaSweep(2, 1), phi, weight);
            const double cemp = report.rows.front().Cemp;
            double worst = 0.0;
            bool decreasing = true;
            double previous = std::numeric_limits<double>::infinity();
            std::string trail;
            for (const auto& row : report.rows)
            {
                worst = std::max(worst, (row.Q - report.base) / (cemp * row.growth));
                const double ratio = row.Q / std::log(1.0 / row.delta);
                decreasing = decreasing && ratio < previous;
                previous = ratio;
                trail += (trail.empty() ? "" : ", ") + fmt(ratio);
            }
            c.add(fittedBoundHolds(report, 1.2),
                  "C_emp = " + fmt(cemp) + " fitted at 2^-4, worst (Q - |Omega| log 2)/(C_emp psi W) = " + fmt(worst) +
                      " (<= 1.2)");
            c.add(decreasing, "Q/log(1/delta) decreasing: " + trail);
            return {5, "w11-bound", c.pass, c.out.str()};
        }

        CriterionResult twoDUniformity(const AcceptanceOptions& opt)
        {
            Checks c;
            const ScenarioSpec spec = build("crossing_jump2d");
            const char* axisName[] = {"(r,0)", "(0,r)"};
            for (int axis : {1, 0})
            {
                const FlowGrid grid = sweepGrid(spec, axis, opt);
                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                double mean = 0.0;
                const auto deltas = deltaSweep(2, axis);
                for (const Point& delta : deltas)
                {
                    const double q = qDelta(grid.withShift(delta), 1.0);
                    lo = std::min(lo, q);
                    hi = std::max(hi, q);
                    mean += q / static_cast<double>(deltas.size());
                }
                c.add(hi - lo <= 0.2 * mean, std::string("delta = ") + axisName[axis] + ": Q_delta(1) in [" + fmt(lo) +
                                                 ", " + fmt(hi) + "], spread/mean = " + fmt((hi - lo) / mean) + " (<= 0.2)");
            }

            FlowGridOptions go;
            go.workers = opt.workers;
            const double t = 1.0;
            const double r = 1.0 / 64.0;
            for (int axis : {1, 0})
            {
                // Levels X_1 up to about 2t must be reached, hence the longer horizon.
                const FlowGrid grid = flowGrid(*spec.field, spec.domain, 1.0 / 128.0, 2.5, 1.0 / 128.0,
                                               axisShift(2, axis, r), go);
                const TwoDTerms terms = twoDTerms(grid, *spec.field, t, *spec.facts.C, opt.workers);
                c.add(terms.I <= terms.rhsI && terms.II <= terms.rhsII,
                      std::string("delta = ") + axisName[axis] + ": I = " + fmt(terms.I) + " <= " + fmt(terms.rhsI) +
                          ", II = " + fmt(terms.II) + " <= " + fmt(terms.rhsII));
            }
            c.add(true, "C = " + fmt(*spec.facts.C) + ", |db| mass " + fmt(totalVariation(*spec.field)));
            return {6, "two-d-uniformity", c.pass, c.out.str()};
        }

        // 7 ---------------------------------------------------------------------------

        CriterionResult psiClosedForm(const AcceptanceOptions&)
        {
            Checks c;
            const double delta = std::exp(-8.0);
            const double L = 8.0;
            const double M = std::sqrt(2.0 * L);
            const double oracle = M + 2.0 * L / M;
            const double psi = psiModulus(PhiSpec::power(2.0), delta);
            c.add(std::abs(psi - 8.0) <= 1e-6 && std::abs(oracle - 8.0) <= 1e-12,
                  "psi(e^-8) = " + std::to_string(psi) + " for xi^2 (oracle " + fmt(oracle) + ")");
            for (const PhiSpec& phi : {PhiSpec::power(1.5), PhiSpec::entropic()})
            {
                double previous = std::numeric_limits<double>::infinity();
                bool monotone = true;
                double last = 0.0;
                for (int k = 4; k <= 40; ++k)
                {
                    const double d = std::ldexp(1.0, -k);
                    last = psiModulus(phi, d) / std::log(1.0 / d);
                    monotone = monotone && last < previous;
                    previous = last;
                }
                c.add(monotone, "psi/log(1/delta) decreasing for " + phi.describe() + " down to " + fmt(last));
            }
            return {7, "psi-closed-form", c.pass, c.out.str()};
        }

        // 8 ---------------------------------------------------------------------------

        struct Pair
        {
            Point x;
            Point y;
        };

        std::vector<Pair> seededPairs(int count)
        {
            Rng rng(2024);
            std::vector<Pair> pairs;
            for (int i = 0; i < count; ++i)
            {
                const Point x = makePoint({rng.uniform(-0.75, 0.75), rng.uniform(-0.75, 0.75)});
                const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
                const double r = std::pow(10.0, rng.uniform(-3.0, -0.5));
                pairs.push_back({x, x + r * makePoint({std::cos(angle), std::sin(angle)})});
            }
            return pairs;
        }

        CriterionResult kernelBounds(const AcceptanceOptions&)
        {
            Checks c;
            const ScenarioSpec spec = build("smooth_random", {{"seed", 1}});
            const VectorField& f = *spec.field;
            const auto pairs = seededPairs(1000);

            auto kernelConstant = [&](int cells, double scale) {
                double worst = 0.0;
                bool holds = true;
                for (const auto& p : pairs)
                {
                    const BoundPair b = kernelDifferenceBound(f, p.x, p.y, cells);
                    if (scale > 0.0) holds = holds && b.lhs <= scale * b.rhs;
                    if (b.rhs > 0.0) worst = std::max(worst, b.lhs / b.rhs);
                }
                return std::pair{worst, holds};
            };
            const auto [coarse, unused] = kernelConstant(32, 0.0);
            const auto [fine, holds] = kernelConstant(64, 1.2 * coarse);
            c.add(holds && std::abs(fine / coarse - 1.0) <= 0.2,
                  "kernel bound C_emp = " + fmt(coarse) + " (32 cells), " + fmt(fine) + " (64 cells)");

            const auto radii = dyadicRadii(spec.domain.diameter(), 12);
            auto maximalConstant = [&](int cells, double scale) {
                double worst = 0.0;
                bool ok = true;
                for (const auto& p : pairs)
                {
                    const double lhs = (f(p.x) - f(p.y)).norm();
                    const double rhs = (p.x - p.y).norm() *
                                       (maximalFunction(f, p.x, radii, cells) + maximalFunction(f, p.y, radii, cells));
                    if (scale > 0.0) ok = ok && lhs <= scale * rhs;
                    if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
                }
                return std::pair{worst, ok};
            };
            const auto [mCoarse, unused2] = maximalConstant(16, 0.0);
            const auto [mFine, mHolds] = maximalConstant(32, 1.2 * mCoarse);
            c.add(mHolds && std::abs(mFine / mCoarse - 1.0) <= 0.2,
                  "maximal bound C_emp = " + fmt(mCoarse) + " (16 cells), " + fmt(mFine) + " (32 cells)");
            (void)unused;
            (void)unused2;
            return {8, "kernel-bounds", c.pass, c.out.str()};
        }

        // 9 ---------------------------------------------------------------------------

        CriterionResult exceptionalSets(const AcceptanceOptions& opt)
        {
            Checks c;
            const std::vector<double> radii{0.05, 0.02, 0.01};
            FlowGridOptions go;
            go.workers = opt.workers;
            {
                const ScenarioSpec spec = build("tangent_jump2d");
                const FlowGrid grid = flowGrid(*spec.field, spec.domain, 0.01, 1.0, 0.01, axisShift(2, 1, 0.05), go);
                for (double r : radii)
                {
                    const auto omega = exceptionalSet(grid.withShift(axisShift(2, 1, r)), 3.0 * r);
                    c.add(omega.measure <= 3.0 * r + 1e-12,
                          "tangent r=" + fmt(r) + ": |omega(3r)| = " + fmt(omega.measure) + " <= " + fmt(3.0 * r));
                }
            }
            {
                const ScenarioSpec spec = build("crossing_jump2d");
                const FlowGrid grid = flowGrid(*spec.field, spec.domain, 0.01, 1.0, 0.01, axisShift(2, 0, 0.05), go);
                const double bound = 0.05 * spec.domain.measure();
                for (double r : radii)
                {
                    const auto omega = exceptionalSet(grid.withShift(axisShift(2, 0, r)), 4.0 * r);
                    c.add(omega.measure <= bound,
                          "crossing r=" + fmt(r) + ": |omega(4r)| = " + fmt(omega.measure) + " <= " + fmt(bound));
                }
            }
            return {9, "exceptional-sets", c.pass, c.out.str()};
        }

        // 10 --------------------------------------------------------------------------

        CriterionResult oracleAgreement(const AcceptanceOptions& opt)
        {
            Checks c;
            for (const auto& entry : catalog())
            {
                const ScenarioSpec spec = build(entry.name);
                if (!spec.flags.smooth) continue;
                const int d = spec.domain.dim();
                const double h = d == 1 ? 1e-3 : 1.0 / 32.0;
                FlowGridOptions go;
                go.halo = 1;
                go.workers = opt.workers;
                const FlowGrid grid = flowGrid(*spec.field, spec.domain, h, 1.0, 1.0 / 64.0, std::nullopt, go);
                const JacobianEstimate fd = jacobianFd(grid, 1.0, opt.workers);
                double worst = 0.0;
                for (const auto& e : fd.entries)
                {
                    if (e.status != NodeStatus::Ok) continue;
                    const double along = jacobianAlong(*spec.field, grid.trajectory(e.node), e.node).entries.back().J;
                    worst = std::max(worst, std::abs(e.J / along - 1.0));
                }
                c.add(worst <= 0.02, spec.name + " FD/along rel " + fmt(worst));
            }

            auto semigroup = [&](const std::string& name, const Point& x0, double s, double t, double dt) {
                const ScenarioSpec spec = build(name);
                const double gap = semigroupCheck(*spec.field, x0, s, t, dt);
                const double tol = spec.flags.hasJump ? 10.0 * kEventTolerance
                                                      : 10.0 * std::pow(dt, 4) * (s + t) *
                                                            std::exp(spec.facts.lipschitz.value_or(1.0) * (s + t));
                c.add(gap <= tol, name + " semigroup " + fmt(gap) + " <= " + fmt(tol));
            };
            semigroup("rotation2d", makePoint({0.6, 0.2}), 0.33, 0.67, 0.05);
            semigroup("dilation1d", makePoint({0.3}), 0.33, 0.67, 0.05);
            semigroup("linear", makePoint({0.4, -0.3}), 0.33, 0.67, 0.05);
            semigroup("constant", makePoint({0.1, 0.2}), 0.33, 0.67, 0.05);
            semigroup("smooth_random", makePoint({0.2, -0.4}), 0.33, 0.67, 0.05);
            semigroup("heaviside1d", makePoint({-0.3}), 0.23, 0.31, 0.05);
            semigroup("crossing_jump2d", makePoint({-0.3, 0.1}), 0.23, 0.31, 0.05);
            semigroup("tangent_jump2d", makePoint({0.1, -0.2}), 0.23, 0.31, 0.05);

            const ScenarioSpec rot = build("rotation2d");
            const Point x0 = makePoint({0.6, 0.2});
            auto terminal = [&](double dt) { return integrate(*rot.field, x0, 1.0, dt).terminal(); };
            const double dt = 0.1;
            const Point reference = terminal(dt / 8.0);
            const double e1 = (terminal(dt) - reference).norm();
            const double e2 = (terminal(dt / 2.0) - reference).norm();
            const double order = std::log2(e1 / e2);
            c.add(order >= 3.8, "rotation2d order " + fmt(order) + " (>= 3.8)");
            return {10, "oracle-agreement", c.pass, c.out.str()};
        }

        // trivial -----------------------------------------------------------------------

        CriterionResult constantQ(const AcceptanceOptions& opt)
        {
            const ScenarioSpec spec = build("constant");
            FlowGridOptions go;
            go.workers = opt.workers;
            const FlowGrid grid = flowGrid(*spec.field, spec.domain, 0.01, 1.0, 0.01, axisShift(2, 0, 0.01), go);
            double worst = 0.0;
            for (double t : {0.0, 0.5, 1.0})
                worst = std::max(worst, std::abs(qDelta(grid, t) - spec.domain.measure() * std::numbers::ln2));
            return {0, "q-constant", worst <= 1e-9, "constant field, max |Q - |Omega| log 2| = " + fmt(worst)};
        }

        struct Entry
        {
            int id;
            const char* name;
            Criterion run;
        };

        const Entry kQInitial{1, "q-initial", qInitial};
        const Entry kHeaviside{2, "heaviside", heaviside};
        const Entry kSqrt{3, "sqrt-selection", sqrtSelection};
        const Entry kBianchini{4, "bianchini", bianchini};
        const Entry kW11{5, "w11-bound", w11Bound};
        const Entry kTwoD{6, "two-d-uniformity", twoDUniformity};
        const Entry kPsi{7, "psi-closed-form", psiClosedForm};
        const Entry kKernel{8, "kernel-bounds", kernelBounds};
        const Entry kExceptional{9, "exceptional-sets", exceptionalSets};
        const Entry kOracle{10, "oracle-agreement", oracleAgreement};
        const Entry kConstantQ{0, "q-constant", constantQ};

        const std::vector<std::pair<std::string, std::vector<Entry>>>& suites()
        {
            static const std::vector<std::pair<std::string, std::vector<Entry>>> table = [] {
                const std::vector<Entry> numbered{kQInitial, kHeaviside, kSqrt,  kBianchini,    kW11,
                                                  kTwoD,     kPsi,       kKernel, kExceptional, kOracle};
                std::vector<std::pair<std::string, std::vector<Entry>>> out;
                out.push_back({"trivial", {kConstantQ, kPsi}});
                for (const Entry& e : numbered) out.push_back({e.name, {e}});
                out.push_back({"all", numbered});
                return out;
            }();
            return table;
        }
    } // namespace

    const std::vector<std::string>& suiteNames()
    {
        static const std::vector<std::string> names = [] {
            std::vector<std::string> out;
            for (const auto& s : suites()) out.push_back(s.first);
            return out;
        }();
        return names;
    }

    std::vector<CriterionResult> runSuite(const std::string& name, const AcceptanceOptions& options,
                                          const std::function<void(const CriterionResult&)>& onResult)
    {
        for (const auto& [suite, criteria] : suites())
        {
            if (suite != name) continue;
            std::vector<CriterionResult> results;
            for (const Entry& entry : criteria)
            {
                const auto start = std::chrono::steady_clock::now();
                CriterionResult r;
                try
                {
                    r = entry.run(options);
                }
                catch (const std::exception& e)
                {
                    r.pass = false;
                    r.detail = std::string("error: ") + e.what();
                }
                r.id = entry.id;
                r.suite = entry.name;
                r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                if (onResult) onResult(r);
                results.push_back(r);
            }
            return results;
        }
        throw InputError("unknown acceptance suite '" + name + "'");
    }

    std::string formatResult(const CriterionResult& r)
    {
        std::ostringstream s;
        s << (r.pass ? "[PASS] " : "[FAIL] ");
        if (r.id > 0) s << r.id << ' ';
        char secs[32];
        std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
        s << r.suite << " (" << secs << " s): " << r.detail;
        return s.str();
    }
} // namespace flowlab
