#include "flowlab/functionals.hpp"

#include "flowlab/errors.hpp"
#include "flowlab/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace flowlab
{
    namespace
    {
        double cellVolume(const FlowGrid& grid) { return std::pow(grid.spacing(), grid.dim()); }

        double sumInOrder(const std::vector<double>& parts)
        {
            double total = 0.0;
            for (double v : parts) total += v;
            return total;
        }

        void requireShift(const FlowGrid& grid, const char* what)
        {
            if (!grid.shift()) throw InputError(std::string(what) + ": grid has no shift δ (unpaired)");
        }
    } // namespace

    // --- φ and ψ ------------------------------------------------------------------

    PhiSpec PhiSpec::power(double p)
    {
        if (!(p > 0.0) || !std::isfinite(p)) throw InputError("phi: power exponent must be positive");
        return PhiSpec(Kind::Power, p);
    }

    PhiSpec PhiSpec::entropic() { return PhiSpec(Kind::Entropic, 1.0); }

    std::string PhiSpec::describe() const
    {
        if (kind_ == Kind::Entropic) return "xi*log(1+xi)";
        std::ostringstream s;
        s << "xi^" << exponent_;
        return s.str();
    }

    double PhiSpec::operator()(double xi) const
    {
        if (kind_ == Kind::Entropic) return xi * std::log1p(xi);
        return std::pow(xi, exponent_);
    }

    bool PhiSpec::isSuperlinear() const
    {
        double previous = 0.0;
        double first = 0.0;
        constexpr int samples = 49;
        for (int k = 0; k < samples; ++k)
        {
            const double xi = std::pow(10.0, -3.0 + 12.0 * k / (samples - 1));
            const double ratio = (*this)(xi) / xi;
            if (k == 0)
                first = ratio;
            else if (ratio < previous * (1.0 - 1e-12))
                return false;
            previous = ratio;
        }
        return previous > first * (1.0 + 1e-6);
    }

    double psiModulus(const PhiSpec& phi, double delta, PsiVariant variant)
    {
        if (!(delta > 0.0 && delta < 1.0)) throw InputError("psi: delta must lie in (0, 1)");
        if (!phi.isSuperlinear()) throw InputError("psi: phi = " + phi.describe() + " is not superlinear");
        const double L = std::log(1.0 / delta);
        auto objective = [&](double u) {
            const double M = std::exp(u);
            const double ratio = M / phi(M);
            const double head = variant == PsiVariant::LlogL ? M * std::log(M) / phi(M) : M;
            return head + 2.0 * ratio * L;
        };

        const double invPhi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = 0.0;
        double b = std::log(1e12);
        double c = b - invPhi * (b - a);
        double d = a + invPhi * (b - a);
        double fc = objective(c);
        double fd = objective(d);
        // Relative tolerance on M is an absolute tolerance on log M.
        while (b - a > 1e-10)
        {
            if (fc < fd)
            {
                b = d;
                d = c;
                fd = fc;
                c = b - invPhi * (b - a);
                fc = objective(c);
            }
            else
            {
                a = c;
                c = d;
                fc = fd;
                d = a + invPhi * (b - a);
                fd = objective(d);
            }
        }
        return std::min({objective(0.5 * (a + b)), objective(0.0), objective(std::log(1e12))});
    }

    // --- compactness functionals --------------------------------------------------

    double qDelta(const FlowGrid& grid, double t)
    {
        requireShift(grid, "q_delta");
        const int k = grid.sampleIndex(t);
        const double norm = grid.shift()->norm();
        const auto& nodes = grid.primaryNodes();
        std::vector<double> parts(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            const auto p = grid.partner(nodes[i]);
            if (!p) throw InputError("q_delta: node without partner; the grid halo does not cover the shift");
            const double gap = (grid.trajectory(nodes[i]).position(k) - grid.trajectory(*p).position(k)).norm();
            parts[i] = std::log1p(gap / norm);
        }
        return sumInOrder(parts) * cellVolume(grid);
    }

    std::vector<Point> axisDirections(int dim)
    {
        std::vector<Point> dirs;
        for (int i = 0; i < dim; ++i)
        {
            for (double s : {1.0, -1.0})
            {
                Point w = Point::Zero(dim);
                w[i] = s;
                dirs.push_back(w);
            }
        }
        return dirs;
    }

    double cdFunctional(const FlowGrid& grid, const std::vector<double>& radii, const std::vector<Point>& directions,
                        double t)
    {
        if (radii.empty() || directions.empty()) throw InputError("cd functional: need radii and directions");
        const int k = grid.sampleIndex(t);
        std::vector<std::pair<double, std::vector<LatticeIndex>>> stencil;
        for (double r : radii)
        {
            if (!(r > 0.0)) throw InputError("cd functional: radii must be positive");
            std::vector<LatticeIndex> offsets;
            for (const Point& w : directions)
            {
                if (w.size() != grid.dim() || std::abs(w.norm() - 1.0) > 1e-12)
                    throw InputError("cd functional: directions must be unit vectors");
                try
                {
                    offsets.push_back(FlowGrid::latticeOffset(r * w, grid.spacing()));
                }
                catch (const InputError&)
                {
                    throw InputError("cd functional: radius " + std::to_string(r) + " along a direction is not on the lattice");
                }
            }
            stencil.emplace_back(r, std::move(offsets));
        }

        const auto& nodes = grid.primaryNodes();
        std::vector<double> parts(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            const auto base = grid.lattice(nodes[i]);
            const Point x = grid.trajectory(nodes[i]).position(k);
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& [r, offsets] : stencil)
            {
                double sum = 0.0;
                for (const auto& o : offsets)
                {
                    LatticeIndex idx = base;
                    for (int a = 0; a < grid.dim(); ++a) idx[a] += o[a];
                    const auto other = grid.flat(idx);
                    if (!other) throw InputError("cd functional: lattice halo too small for radius " + std::to_string(r));
                    sum += std::log1p((grid.trajectory(*other).position(k) - x).norm() / r);
                }
                best = std::max(best, sum / static_cast<double>(offsets.size()));
            }
            parts[i] = best;
        }
        return sumInOrder(parts) * cellVolume(grid);
    }

    // --- swap example ------------------------------------------------------------

    double bianchiniSwap(double x, int n)
    {
        const double a = std::abs(x);
        if (a < 1.0 / n || a > 1.0) return x;
        const int k = std::min(static_cast<int>(std::floor(a * n)), n - 1);
        return a < (2.0 * k + 1.0) / (2.0 * n) ? x : -x;
    }

    namespace
    {
        double heaviside(double x) { return x > 0.0 ? 1.0 : 0.0; }
    } // namespace

    double bianchiniGap(int n, bool identityMap)
    {
        if (n < 2) throw InputError("bianchini gap: n must be at least 2");
        const double delta = 1.0 / (2.0 * n);
        const long nodes = 64L * n;
        const double cell = 2.0 / static_cast<double>(nodes);
        auto X = [&](double x) { return identityMap ? x : bianchiniSwap(x, n); };
        double total = 0.0;
        for (long i = 0; i < nodes; ++i)
        {
            const double x = -1.0 + (static_cast<double>(i) + 0.5) * cell;
            const double a = X(x);
            const double b = X(x + delta);
            total += std::abs(heaviside(a) - heaviside(b)) / (delta + std::abs(a - b));
        }
        return total * cell;
    }

    LogFit fitLogGrowth(const std::vector<double>& n, const std::vector<double>& values)
    {
        if (n.size() != values.size() || n.size() < 2) throw InputError("log fit: need at least two matching samples");
        const double m = static_cast<double>(n.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n.size(); ++i)
        {
            const double x = std::log(n[i]);
            sx += x;
            sy += values[i];
            sxx += x * x;
            sxy += x * values[i];
        }
        LogFit fit;
        const double denom = m * sxx - sx * sx;
        if (denom == 0.0) throw InputError("log fit: abscissae are all equal");
        fit.slope = (m * sxy - sx * sy) / denom;
        fit.intercept = (sy - fit.slope * sx) / m;
        const double mean = sy / m;
        double ssTot = 0, ssRes = 0;
        for (std::size_t i = 0; i < n.size(); ++i)
        {
            const double pred = fit.intercept + fit.slope * std::log(n[i]);
            ssRes += (values[i] - pred) * (values[i] - pred);
            ssTot += (values[i] - mean) * (values[i] - mean);
        }
        fit.rSquared = ssTot > 0.0 ? 1.0 - ssRes / ssTot : 1.0;
        return fit;
    }

    // --- 2d terms ------------------------------------------------------------------

    TwoDTerms twoDTerms(const FlowGrid& grid, const VectorField& f, double t, double C, int workers)
    {
        requireShift(grid, "two_d_terms");
        if (!f.driftFlag()) throw PreconditionError("two_d_terms: field '" + f.name() + "' has no drift flag (b_1 >= 1)");
        if (grid.dim() != 2 || f.dim() != 2) throw InputError("two_d_terms: needs a planar grid and field");
        const int steps = grid.sampleIndex(t);
        const double ds = grid.sampleSpacing();
        const double norm = grid.shift()->norm();
        const auto& nodes = grid.primaryNodes();

        std::vector<double> partI(nodes.size());
        std::vector<double> partII(nodes.size());
        parallelFor(nodes.size(), workers, [&](std::size_t i) {
            const auto p = grid.partner(nodes[i]);
            if (!p) throw InputError("two_d_terms: node without partner");
            const Trajectory& tx = grid.trajectory(nodes[i]);
            const Trajectory& tp = grid.trajectory(*p);
            double a = 0.0;
            double b = 0.0;
            for (int k = 0; k < steps; ++k)
            {
                const double s = tx.time(k);
                const double td = crossingTime(tx, tp, s);
                const Point xs = tx.position(k);
                const Point ps = tp.position(k);
                const Point bAtCrossing = f(tx.positionAt(td));
                a += (bAtCrossing - f(ps)).norm() / norm;
                b += (f(xs) - bAtCrossing).norm() / (norm + (xs - ps).norm());
            }
            partI[i] = a;
            partII[i] = b;
        });

        TwoDTerms out;
        const double weight = ds * cellVolume(grid);
        out.I = sumInOrder(partI) * weight;
        out.II = sumInOrder(partII) * weight;
        out.totalVariation = totalVariation(f);
        out.rhsI = 4.0 * (4.0 * t + norm) * out.totalVariation;
        out.rhsII = 3.0 * C * (t + norm) * out.totalVariation;
        return out;
    }

    ExceptionalSet exceptionalSet(const FlowGrid& grid, double eps)
    {
        requireShift(grid, "exceptional_set");
        if (!(eps >= 0.0)) throw InputError("exceptional_set: eps must be nonnegative");
        const auto& nodes = grid.primaryNodes();
        ExceptionalSet out;
        out.eps = eps;
        out.indicator.assign(nodes.size(), 0);
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            const auto p = grid.partner(nodes[i]);
            if (!p) throw InputError("exceptional_set: node without partner");
            const Trajectory& a = grid.trajectory(nodes[i]);
            const Trajectory& b = grid.trajectory(*p);
            const double sup = (a.positions - b.positions).colwise().norm().maxCoeff();
            if (sup > eps)
            {
                out.indicator[i] = 1;
                ++out.count;
            }
        }
        out.measure = static_cast<double>(out.count) * cellVolume(grid);
        return out;
    }

    // --- reports ---------------------------------------------------------------------

    FunctionalReport functionalReport(const FlowGrid& grid, const std::string& scenario, BoundForm form,
                                      const std::vector<double>& times, const std::vector<Point>& deltas,
                                      const std::optional<PhiSpec>& phi, double weightIntegral)
    {
        if (deltas.empty() || times.empty()) throw InputError("functional report: need times and shifts");
        if (form == BoundForm::W11 && !phi) throw InputError("functional report: W11 bound needs a phi");
        FunctionalReport report;
        report.scenario = scenario;
        report.form = form;
        report.h = grid.spacing();
        report.dt = grid.dt();
        report.base = grid.domain().measure() * std::numbers::ln2;
        report.weightIntegral = weightIntegral;

        std::size_t reference = 0;
        for (std::size_t j = 1; j < deltas.size(); ++j)
        {
            if (deltas[j].norm() > deltas[reference].norm()) reference = j;
        }

        for (double t : times)
        {
            std::vector<FunctionalRow> rows;
            for (const Point& delta : deltas)
            {
                FunctionalRow row;
                row.scenario = scenario;
                row.t = t;
                row.delta = delta.norm();
                row.Q = qDelta(grid.withShift(delta), t);
                row.psi = (phi && row.delta < 1.0) ? psiModulus(*phi, row.delta) : std::numeric_limits<double>::quiet_NaN();
                row.growth = form == BoundForm::W11 ? t * row.psi * weightIntegral : (t + row.delta) * weightIntegral;
                rows.push_back(row);
            }
            const FunctionalRow& ref = rows[reference];
            const double cemp = ref.growth > 0.0 ? std::max(0.0, (ref.Q - report.base) / ref.growth) : 0.0;
            for (auto& row : rows)
            {
                row.Cemp = cemp;
                row.rhs = report.base + cemp * row.growth;
                report.rows.push_back(row);
            }
        }
        return report;
    }

    bool fittedBoundHolds(const FunctionalReport& report, double slack)
    {
        for (const auto& row : report.rows)
        {
            const double bound = report.base + slack * row.Cemp * row.growth;
            if (!(row.Q <= bound + 1e-12 * std::max(1.0, bound))) return false;
        }
        return true;
    }
} // namespace flowlab
