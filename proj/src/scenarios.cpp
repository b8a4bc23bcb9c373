#include "flowlab/scenarios.hpp"

#include "flowlab/errors.hpp"
#include "flowlab/functionals.hpp"
#include "flowlab/random.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace flowlab
{
    namespace
    {
        using Builder = ScenarioSpec (*)(const Params&);

        // --- parameter access ------------------------------------------------------

        void checkKeys(const std::string& scenario, const Params& params, const std::set<std::string>& allowed)
        {
            if (!params.is_object()) throw CatalogError(scenario + ": parameters must be a key-value map");
            for (const auto& [key, value] : params.items())
            {
                if (!allowed.contains(key)) throw CatalogError(scenario + ": unknown parameter '" + key + "'");
            }
        }

        double getDouble(const std::string& scenario, const Params& params, const std::string& key, double fallback)
        {
            if (!params.contains(key)) return fallback;
            const auto& v = params.at(key);
            if (!v.is_number()) throw CatalogError(scenario + ": parameter '" + key + "' must be a number");
            return v.get<double>();
        }

        int getInt(const std::string& scenario, const Params& params, const std::string& key, int fallback)
        {
            if (!params.contains(key)) return fallback;
            const auto& v = params.at(key);
            if (!v.is_number_integer()) throw CatalogError(scenario + ": parameter '" + key + "' must be an integer");
            return v.get<int>();
        }

        Point getVector(const std::string& scenario, const Params& params, const std::string& key, const Point& fallback)
        {
            if (!params.contains(key)) return fallback;
            const auto& v = params.at(key);
            if (!v.is_array() || v.empty() || v.size() > 3)
                throw CatalogError(scenario + ": parameter '" + key + "' must be a list of 1 to 3 numbers");
            Point p(static_cast<Eigen::Index>(v.size()));
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                if (!v[i].is_number()) throw CatalogError(scenario + ": parameter '" + key + "' must hold numbers");
                p[static_cast<Eigen::Index>(i)] = v[i].get<double>();
            }
            return p;
        }

        Eigen::MatrixXd getMatrix(const std::string& scenario, const Params& params, const std::string& key,
                                  const Eigen::MatrixXd& fallback)
        {
            if (!params.contains(key)) return fallback;
            const auto& v = params.at(key);
            const std::string bad = scenario + ": parameter '" + key + "' must be a square list of rows, size 1 to 3";
            if (!v.is_array() || v.empty() || v.size() > 3) throw CatalogError(bad);
            const auto n = static_cast<Eigen::Index>(v.size());
            Eigen::MatrixXd A(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
            {
                const auto& row = v[static_cast<std::size_t>(i)];
                if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw CatalogError(bad);
                for (Eigen::Index j = 0; j < n; ++j)
                {
                    if (!row[static_cast<std::size_t>(j)].is_number()) throw CatalogError(bad);
                    A(i, j) = row[static_cast<std::size_t>(j)].get<double>();
                }
            }
            return A;
        }

        Params toJson(const Point& p)
        {
            Params a = Params::array();
            for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
            return a;
        }

        /// b₁ ∈ [1, 2] and ‖b‖ ≤ 2.
        void checkDrift(const std::string& scenario, const std::string& key, const Point& b)
        {
            if (b.size() != 2) throw CatalogError(scenario + ": '" + key + "' must have two components");
            if (!(b[0] >= 1.0 && b[0] <= 2.0))
                throw CatalogError(scenario + ": '" + key + "' violates the drift bound b_1 in [1, 2]");
            if (!(b.norm() <= 2.0 + 1e-15))
                throw CatalogError(scenario + ": '" + key + "' violates the drift bound |b| <= 2");
        }

        SmoothMap constantMap(const Point& v)
        {
            const auto d = v.size();
            return {[v](const Point&) { return v; }, [d](const Point&) { return Jacobian(Jacobian::Zero(d, d)); }};
        }

        // --- catalog builders --------------------------------------------------------

        ScenarioSpec buildSqrt(const Params& params)
        {
            checkKeys("sqrt1d", params, {});
            const Domain support = Domain::cube(1, -2.0, 2.0);
            SmoothMap map;
            map.value = [](const Point& x) { return makePoint({std::sqrt(std::abs(x[0]))}); };
            map.jacobian = [](const Point& x) {
                Jacobian j(1, 1);
                j(0, 0) = (x[0] > 0.0 ? 0.5 : -0.5) / std::sqrt(std::abs(x[0]));
                return j;
            };
            ScenarioSpec spec{.name = "sqrt1d",
                              .params = Params::object(),
                              .domain = support,
                              .field = VectorField::analytic("sqrt1d", support, map, std::sqrt(2.0))};
            spec.facts.horizon = 4.0;
            spec.facts.exactFlow = [](double t, const Point& x) { return makePoint({sqrtFlow(t, x[0])}); };
            spec.facts.notes = "solutions from x < 0 branch at t = 2 sqrt|x|; the invertible branch leaves 0 at once";
            spec.defaultH = 1.0 / 256.0;
            return spec;
        }

        ScenarioSpec buildHeaviside(const Params& params)
        {
            checkKeys("heaviside1d", params, {});
            const Domain support = Domain::cube(1, -1.0, 1.0);
            ScenarioSpec spec{
                .name = "heaviside1d",
                .params = Params::object(),
                .domain = support,
                .field = VectorField::piecewise("heaviside1d", support, JumpSet::hyperplane(makePoint({1.0}), 0.0),
                                                constantMap(makePoint({1.0})), constantMap(makePoint({0.5})), 1.0)};
            spec.flags.nearlyIncompressible = true;
            spec.flags.hasJump = true;
            spec.facts.C = 2.0;
            spec.facts.exactFlow = [](double t, const Point& x) {
                if (x[0] > 0.0) return makePoint({x[0] + 0.5 * t});
                if (t + x[0] <= 0.0) return makePoint({x[0] + t});
                return makePoint({0.5 * (t + x[0])});
            };
            spec.defaultH = 1.0 / 256.0;
            return spec;
        }

        ScenarioSpec buildBianchini(const Params& params)
        {
            checkKeys("bianchini_swap", params, {"n"});
            const int n = getInt("bianchini_swap", params, "n", 16);
            if (n < 2) throw CatalogError("bianchini_swap: n must be at least 2");
            ScenarioSpec spec{.name = "bianchini_swap", .params = {{"n", n}}, .domain = Domain::cube(1, -1.0, 1.0)};
            spec.explicitMap = [n](double, const Point& x) { return makePoint({bianchiniSwap(x[0], n)}); };
            spec.flags.mapOnly = true;
            spec.flags.nearlyIncompressible = true;
            spec.facts.C = 1.0;
            spec.facts.delta = 1.0 / (2.0 * n);
            spec.facts.boundForm = "log-lower";
            spec.facts.notes = "interval swap; the gap integral grows like c log n for the Heaviside step";
            return spec;
        }

        ScenarioSpec buildCrossing(const Params& params)
        {
            const std::string name = "crossing_jump2d";
            checkKeys(name, params, {"b_minus", "b_plus"});
            const Point bm = getVector(name, params, "b_minus", makePoint({1.0, 0.5}));
            const Point bp = getVector(name, params, "b_plus", makePoint({1.0, -0.5}));
            checkDrift(name, "b_minus", bm);
            checkDrift(name, "b_plus", bp);
            const Domain support = Domain::cube(2, -1.0, 1.0);
            ScenarioSpec spec{
                .name = name,
                .params = {{"b_minus", toJson(bm)}, {"b_plus", toJson(bp)}},
                .domain = support,
                .field = VectorField::piecewise(name, support, JumpSet::hyperplane(makePoint({1.0, 0.0}), 0.0),
                                                constantMap(bm), constantMap(bp), std::max(bm.norm(), bp.norm()), true)};
            spec.flags.driftFlag = true;
            spec.flags.hasJump = true;
            spec.flags.nearlyIncompressible = true;
            const double ratio = bp[0] / bm[0];
            spec.facts.C = std::max(ratio, 1.0 / ratio);
            spec.facts.boundForm = "2d";
            spec.facts.exactFlow = [bm, bp](double t, const Point& x) -> Point {
                if (x[0] > 0.0) return x + t * bp;
                const double tau = -x[0] / bm[0];
                if (t <= tau) return x + t * bm;
                return x + tau * bm + (t - tau) * bp;
            };
            return spec;
        }

        ScenarioSpec buildTangent(const Params& params)
        {
            const std::string name = "tangent_jump2d";
            checkKeys(name, params, {"b_minus", "b_plus"});
            const Point bm = getVector(name, params, "b_minus", makePoint({1.0, 0.0}));
            const Point bp = getVector(name, params, "b_plus", makePoint({2.0, 0.0}));
            checkDrift(name, "b_minus", bm);
            checkDrift(name, "b_plus", bp);
            if (bm[1] != 0.0 || bp[1] != 0.0)
                throw CatalogError(name + ": normal components must vanish (zero normal flux across x_2 = 0)");
            const Domain support = Domain::cube(2, -1.0, 1.0);
            ScenarioSpec spec{
                .name = name,
                .params = {{"b_minus", toJson(bm)}, {"b_plus", toJson(bp)}},
                .domain = support,
                .field = VectorField::piecewise(name, support, JumpSet::hyperplane(makePoint({0.0, 1.0}), 0.0),
                                                constantMap(bm), constantMap(bp), std::max(bm.norm(), bp.norm()), true)};
            spec.flags.driftFlag = true;
            spec.flags.hasJump = true;
            spec.flags.nearlyIncompressible = true;
            spec.facts.C = 1.0;
            spec.facts.boundForm = "2d";
            spec.facts.exactFlow = [bm, bp](double t, const Point& x) -> Point { return x + t * (x[1] > 0.0 ? bp : bm); };
            return spec;
        }

        ScenarioSpec buildRotation(const Params& params)
        {
            checkKeys("rotation2d", params, {});
            // The field lives on a larger box so that orbits through the corners of Ω stay in it.
            const Domain support = Domain::cube(2, -2.0, 2.0);
            SmoothMap map;
            map.value = [](const Point& x) { return makePoint({-x[1], x[0]}); };
            map.jacobian = [](const Point&) {
                Jacobian j(2, 2);
                j << 0.0, -1.0, 1.0, 0.0;
                return j;
            };
            ScenarioSpec spec{.name = "rotation2d",
                              .params = Params::object(),
                              .domain = Domain::cube(2, -1.0, 1.0),
                              .field = VectorField::analytic("rotation2d", support, map, 2.0 * std::sqrt(2.0))};
            spec.flags.smooth = true;
            spec.flags.nearlyIncompressible = true;
            spec.facts.C = 1.0;
            spec.facts.exactFlow = [](double t, const Point& x) {
                const double c = std::cos(t), s = std::sin(t);
                return makePoint({c * x[0] - s * x[1], s * x[0] + c * x[1]});
            };
            spec.facts.lipschitz = 1.0;
            spec.facts.exactQ = [](double, double) { return 4.0 * std::numbers::ln2; };
            return spec;
        }

        ScenarioSpec buildDilation(const Params& params)
        {
            checkKeys("dilation1d", params, {"extent"});
            const double extent = getDouble("dilation1d", params, "extent", 3.0);
            if (!(extent >= 1.0)) throw CatalogError("dilation1d: extent must be at least 1");
            const Domain support = Domain::cube(1, -extent, extent);
            SmoothMap map;
            map.value = [](const Point& x) { return x; };
            map.jacobian = [](const Point&) { return Jacobian(Jacobian::Identity(1, 1)); };
            ScenarioSpec spec{.name = "dilation1d",
                              .params = {{"extent", extent}},
                              .domain = Domain::cube(1, -1.0, 1.0),
                              .field = VectorField::analytic("dilation1d", support, map, extent)};
            spec.flags.smooth = true;
            spec.flags.nearlyIncompressible = true;
            spec.facts.C = std::exp(spec.facts.horizon);
            spec.facts.exactFlow = [](double t, const Point& x) { return Point(x * std::exp(t)); };
            spec.facts.lipschitz = 1.0;
            spec.facts.exactQ = [](double t, double) { return 2.0 * std::log1p(std::exp(t)); };
            spec.facts.notes = "exact while |x| e^t stays below extent";
            spec.defaultH = 1.0 / 256.0;
            return spec;
        }

        ScenarioSpec buildRadial(const Params& params)
        {
            const std::string name = "radial_alpha";
            checkKeys(name, params, {"alpha", "d"});
            const double alpha = getDouble(name, params, "alpha", 0.5);
            const int d = getInt(name, params, "d", 2);
            if (!(alpha > 0.0 && alpha <= 1.0)) throw CatalogError(name + ": alpha must lie in (0, 1]");
            if (d < 1 || d > 3) throw CatalogError(name + ": d must be 1, 2 or 3");
            const Domain support = Domain::cube(d, -1.0, 1.0);
            SmoothMap map;
            map.value = [alpha](const Point& x) -> Point {
                const double r = x.norm();
                return r > 0.0 ? Point(x * std::pow(r, alpha - 1.0)) : Point(x);
            };
            map.jacobian = [alpha, d](const Point& x) -> Jacobian {
                const double r = x.norm();
                if (r == 0.0)
                    return Jacobian::Constant(d, d, std::numeric_limits<double>::infinity());
                return std::pow(r, alpha - 1.0) * Jacobian::Identity(d, d) +
                       (alpha - 1.0) * std::pow(r, alpha - 3.0) * x * x.transpose();
            };
            ScenarioSpec spec{.name = name,
                              .params = {{"alpha", alpha}, {"d", d}},
                              .domain = support,
                              .field = VectorField::analytic(name, support, map, std::pow(std::sqrt(d), alpha))};
            spec.facts.boundForm = "w11";
            spec.facts.exactFlow = [alpha](double t, const Point& x) -> Point {
                const double r = x.norm();
                if (r == 0.0) return x;
                const double rt = alpha == 1.0 ? r * std::exp(t)
                                               : std::pow(std::pow(r, 1.0 - alpha) + (1.0 - alpha) * t,
                                                          1.0 / (1.0 - alpha));
                return x * (rt / r);
            };
            spec.facts.notes = "exact while the orbit stays in the unit ball";
            if (d == 1) spec.defaultH = 1.0 / 256.0;
            if (d == 3) spec.defaultH = 1.0 / 16.0;
            return spec;
        }

        ScenarioSpec buildLinear(const Params& params)
        {
            checkKeys("linear", params, {"A"});
            Eigen::MatrixXd fallback(2, 2);
            fallback << 0.5, 0.0, 0.0, -0.5;
            const Eigen::MatrixXd A = getMatrix("linear", params, "A", fallback);
            const auto d = A.rows();
            const double norm = A.operatorNorm();
            ScenarioSpec spec{.name = "linear",
                              .params = Params::object(),
                              .domain = Domain::cube(static_cast<int>(d), -1.0, 1.0)};
            spec.params["A"] = Params::array();
            for (Eigen::Index i = 0; i < d; ++i) spec.params["A"].push_back(toJson(Point(A.row(i).transpose())));
            const double reach = std::max(2.0, 1.01 * std::sqrt(static_cast<double>(d)) * std::exp(norm * spec.facts.horizon));
            const Domain support = Domain::cube(static_cast<int>(d), -reach, reach);
            SmoothMap map;
            map.value = [A](const Point& x) { return Point(A * x); };
            map.jacobian = [A](const Point&) { return Jacobian(A); };
            spec.field = VectorField::analytic("linear", support, map, norm * reach * std::sqrt(static_cast<double>(d)));
            spec.flags.smooth = true;
            spec.flags.nearlyIncompressible = true;
            spec.facts.C = std::exp(std::abs(A.trace()) * spec.facts.horizon);
            spec.facts.lipschitz = norm;
            spec.facts.exactFlow = [A](double t, const Point& x) {
                const Eigen::MatrixXd E = (A * t).exp();
                return Point(E * x);
            };
            if (d == 1) spec.defaultH = 1.0 / 256.0;
            if (d == 3) spec.defaultH = 1.0 / 16.0;
            return spec;
        }

        ScenarioSpec buildConstant(const Params& params)
        {
            checkKeys("constant", params, {"v"});
            const Point v = getVector("constant", params, "v", makePoint({1.0, 0.0}));
            const int d = static_cast<int>(v.size());
            const Domain support = Domain::cube(d, -1.0, 1.0);
            ScenarioSpec spec{.name = "constant",
                              .params = {{"v", toJson(v)}},
                              .domain = support,
                              .field = VectorField::analytic("constant", support, constantMap(v), v.norm(),
                                                             v[0] >= 1.0 && v[0] <= 2.0 && v.norm() <= 2.0)};
            spec.flags.smooth = true;
            spec.flags.driftFlag = spec.field->driftFlag();
            spec.flags.nearlyIncompressible = true;
            spec.facts.C = 1.0;
            spec.facts.lipschitz = 0.0;
            spec.facts.exactFlow = [v](double t, const Point& x) { return Point(x + t * v); };
            const double omega = support.measure();
            spec.facts.exactQ = [omega](double, double) { return omega * std::numbers::ln2; };
            if (d == 1) spec.defaultH = 1.0 / 256.0;
            if (d == 3) spec.defaultH = 1.0 / 16.0;
            return spec;
        }

        ScenarioSpec buildSmoothRandom(const Params& params)
        {
            checkKeys("smooth_random", params, {"seed"});
            const int seed = getInt("smooth_random", params, "seed", 1);
            if (seed < 0) throw CatalogError("smooth_random: seed must be nonnegative");
            constexpr int modes = 4;
            struct Mode
            {
                Point a;
                Point k;
                double phase;
            };
            Rng rng(static_cast<std::uint64_t>(seed));
            std::vector<Mode> mode;
            double sup = 0.0;
            double divBound = 0.0;
            double lip = 0.0;
            for (int m = 0; m < modes; ++m)
            {
                Mode md{makePoint({rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25)}),
                        makePoint({rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)}), rng.uniform(0.0, 2.0 * std::numbers::pi)};
                sup += md.a.norm();
                divBound += std::abs(md.a.dot(md.k));
                lip += md.a.norm() * md.k.norm();
                mode.push_back(md);
            }
            SmoothMap map;
            map.value = [mode](const Point& x) {
                Point v = Point::Zero(2);
                for (const auto& m : mode) v += m.a * std::sin(m.k.dot(x) + m.phase);
                return v;
            };
            map.jacobian = [mode](const Point& x) {
                Jacobian j = Jacobian::Zero(2, 2);
                for (const auto& m : mode) j += std::cos(m.k.dot(x) + m.phase) * m.a * m.k.transpose();
                return j;
            };
            ScenarioSpec spec{.name = "smooth_random",
                              .params = {{"seed", seed}},
                              .domain = Domain::cube(2, -1.0, 1.0),
                              .field = VectorField::analytic("smooth_random", Domain::cube(2, -2.0, 2.0), map, sup)};
            spec.flags.smooth = true;
            spec.flags.nearlyIncompressible = true;
            spec.facts.C = std::exp(divBound * spec.facts.horizon);
            spec.facts.lipschitz = lip;
            spec.facts.notes = "four seeded sine modes, amplitudes up to 0.25, wave numbers up to 3";
            return spec;
        }

        struct Registered
        {
            CatalogEntry entry;
            Builder builder;
        };

        const std::vector<Registered>& registry()
        {
            static const std::vector<Registered> entries = {
                {{"sqrt1d", {}, "b = sqrt|x| on [-2, 2]; non-unique solutions from x < 0"}, buildSqrt},
                {{"heaviside1d", {}, "b = 1 for x < 0, 1/2 for x > 0"}, buildHeaviside},
                {{"bianchini_swap", {{"n", "int", "16"}}, "interval swap map with delta = 1/2n (map only)"}, buildBianchini},
                {{"crossing_jump2d", {{"b_minus", "vec2", "[1,0.5]"}, {"b_plus", "vec2", "[1,-0.5]"}},
                  "constant fields on either side of x_1 = 0, transversal crossing"},
                 buildCrossing},
                {{"tangent_jump2d", {{"b_minus", "vec2", "[1,0]"}, {"b_plus", "vec2", "[2,0]"}},
                  "constant fields on either side of x_2 = 0 with zero normal flux"},
                 buildTangent},
                {{"rotation2d", {}, "b = (-x_2, x_1)"}, buildRotation},
                {{"dilation1d", {{"extent", "float", "3"}}, "b = x"}, buildDilation},
                {{"radial_alpha", {{"alpha", "float", "0.5"}, {"d", "int", "2"}}, "b = x |x|^(alpha-1) on [-1, 1]^d"},
                 buildRadial},
                {{"linear", {{"A", "matrix", "[[0.5,0],[0,-0.5]]"}}, "b = A x"}, buildLinear},
                {{"constant", {{"v", "vec", "[1,0]"}}, "b = v"}, buildConstant},
                {{"smooth_random", {{"seed", "int", "1"}}, "seeded sum of sine modes in the plane"}, buildSmoothRandom},
            };
            return entries;
        }
    } // namespace

    const std::vector<CatalogEntry>& catalog()
    {
        static const std::vector<CatalogEntry> entries = [] {
            std::vector<CatalogEntry> out;
            for (const auto& r : registry()) out.push_back(r.entry);
            return out;
        }();
        return entries;
    }

    std::string listScenarios()
    {
        std::ostringstream s;
        for (const auto& e : catalog())
        {
            s << e.name;
            for (const auto& p : e.params) s << ' ' << p.name << ':' << p.type << '=' << p.fallback;
            s << "  # " << e.summary << '\n';
        }
        return s.str();
    }

    ScenarioSpec build(const std::string& name, const Params& params)
    {
        for (const auto& r : registry())
        {
            if (r.entry.name == name) return r.builder(params.is_null() ? Params::object() : params);
        }
        throw CatalogError("unknown scenario '" + name + "'");
    }

    double sqrtBranch(double t, double x, double t0)
    {
        if (x > 0.0)
        {
            const double r = std::sqrt(x) + 0.5 * t;
            return r * r;
        }
        const double arrival = 2.0 * std::sqrt(-x);
        if (t0 < arrival) throw InputError("sqrt branch: t0 must be at least 2 sqrt|x|");
        if (t <= arrival)
        {
            const double r = 0.5 * t - std::sqrt(-x);
            return -r * r;
        }
        if (t <= t0) return 0.0;
        const double r = 0.5 * (t - t0);
        return r * r;
    }

    double sqrtFlow(double t, double x) { return sqrtBranch(t, x, x > 0.0 ? 0.0 : 2.0 * std::sqrt(-x)); }
} // namespace flowlab
