#include "flowlab/errors.hpp"
#include "flowlab/fields.hpp"

#include <cmath>
#include <numbers>

namespace flowlab
{
    namespace
    {
        // Midpoint cells of the cube [c - R, c + R]^d whose centres fall inside B(c, R).
        template <typename Fn>
        void forBallCells(const Point& center, double radius, int cellsPerAxis, Fn&& fn)
        {
            const int d = static_cast<int>(center.size());
            const double cell = 2.0 * radius / cellsPerAxis;
            double volume = 1.0;
            for (int i = 0; i < d; ++i) volume *= cell;
            int total = 1;
            for (int i = 0; i < d; ++i) total *= cellsPerAxis;
            Point z(d);
            for (int flat = 0; flat < total; ++flat)
            {
                int rest = flat;
                for (int i = d - 1; i >= 0; --i)
                {
                    z[i] = center[i] - radius + (rest % cellsPerAxis + 0.5) * cell;
                    rest /= cellsPerAxis;
                }
                if ((z - center).squaredNorm() < radius * radius) fn(z, volume, cell * std::sqrt(double(d)));
            }
        }

        double sphereArea(int d)
        {
            switch (d)
            {
            case 1: return 2.0;
            case 2: return 2.0 * std::numbers::pi;
            default: return 4.0 * std::numbers::pi;
            }
        }

        // |p - z|^{1-d} integrated over one cell of volume `volume`; cells within
        // half a diameter of p use the majorant |S^{d-1}| · diam of the ball B(p, diam).
        double kernelCell(const Point& p, const Point& z, double volume, double cellDiam, int d)
        {
            if (d == 1) return volume;
            const double r = (p - z).norm();
            if (r < 0.5 * cellDiam) return sphereArea(d) * cellDiam;
            return volume * std::pow(r, 1 - d);
        }

        void requirePair(const VectorField& f, const Point& x, const Point& y)
        {
            if (x.size() != f.dim() || y.size() != f.dim() || !x.allFinite() || !y.allFinite())
                throw InputError("kernel bound: points must be finite and match the field dimension");
            if ((x - y).norm() == 0.0) throw InputError("kernel bound: x and y must differ");
            const double tol = 1e-12 * f.support().diameter();
            if (!f.support().contains(x, tol) || !f.support().contains(y, tol))
                throw InputError("kernel bound: x and y must lie in the field support");
        }
    } // namespace

    std::vector<double> dyadicRadii(double diameter, int count)
    {
        std::vector<double> radii;
        for (int k = 0; k < count; ++k) radii.push_back(std::ldexp(diameter, -k));
        return radii;
    }

    double maximalFunction(const VectorField& f, const Point& x, const std::vector<double>& radii, int cellsPerAxis)
    {
        if (radii.empty()) throw InputError("maximal function: empty radius list");
        if (x.size() != f.dim() || !x.allFinite()) throw InputError("maximal function: invalid point");
        const double diam = f.support().diameter();
        double best = 0.0;
        for (double r : radii)
        {
            if (!(r > 0.0) || r > diam * (1.0 + 1e-12))
                throw InputError("maximal function: radii must lie in (0, diam]");
            double mass = 0.0;
            double volume = 0.0;
            forBallCells(x, r, cellsPerAxis, [&](const Point& z, double vol, double) {
                mass += densityNoThrow(f, z) * vol;
                volume += vol;
            });
            if (volume > 0.0) best = std::max(best, mass / volume);
        }
        return best;
    }

    BoundPair kernelDifferenceBound(const VectorField& f, const Point& x, const Point& y, int cellsPerAxis)
    {
        requirePair(f, x, y);
        const int d = f.dim();
        BoundPair out;
        out.lhs = (f(x) - f(y)).norm();

        const Point center = 0.5 * (x + y);
        const double radius = 0.5 * (x - y).norm();
        forBallCells(center, radius, cellsPerAxis, [&](const Point& z, double vol, double cellDiam) {
            const double density = densityNoThrow(f, z);
            if (density == 0.0) return;
            out.rhs += density * (kernelCell(x, z, vol, cellDiam, d) + kernelCell(y, z, vol, cellDiam, d));
        });

        if (const JumpSet* jump = f.jumpSet(); jump && jump->isHyperplane())
        {
            for (const auto& node : jump->quadratureInBall(center, radius, 4 * cellsPerAxis))
            {
                const double theta = (f.sideValue(Side::Plus, node.point) - f.sideValue(Side::Minus, node.point)).norm();
                const double rx = (x - node.point).norm();
                const double ry = (y - node.point).norm();
                if (d == 1)
                {
                    out.rhs += 2.0 * theta * node.weight;
                    continue;
                }
                if (rx == 0.0 || ry == 0.0)
                {
                    if (theta > 0.0) out.rhs = std::numeric_limits<double>::infinity();
                    continue;
                }
                out.rhs += theta * (std::pow(rx, 1 - d) + std::pow(ry, 1 - d)) * node.weight;
            }
        }
        return out;
    }

    BoundPair kernelDifferenceBoundAvoiding(const VectorField& f, const Point& x, const Point& y, const JumpSet& jump,
                                            double K, int cellsPerAxis)
    {
        requirePair(f, x, y);
        if (!(K >= 1.0) || K < jump.lipschitz())
            throw InputError("kernel bound: K must satisfy K >= max(1, Lipschitz constant of '" + jump.name() + "')");
        const double gx = jump.level(x);
        const double gy = jump.level(y);
        if (!(gx * gy > 0.0))
            throw PreconditionError("kernel bound: x and y are not strictly on the same side of jump set '" +
                                    jump.name() + "'");

        const int d = f.dim();
        BoundPair out;
        out.lhs = (f(x) - f(y)).norm();
        const Point center = 0.5 * (x + y);
        const double radius = 0.5 * K * (x - y).norm();
        forBallCells(center, radius, cellsPerAxis, [&](const Point& z, double vol, double cellDiam) {
            if (std::abs(jump.level(z)) <= 0.5 * jump.lipschitz() * cellDiam) return;
            const double density = f.sideJacobian(sideOf(jump.level(z)), z).norm();
            if (density == 0.0) return;
            out.rhs += density * (kernelCell(x, z, vol, cellDiam, d) + kernelCell(y, z, vol, cellDiam, d));
        });
        return out;
    }

    JumpTraces jumpTraces(const VectorField& f, const Point& z, double tolerance)
    {
        if (z.size() != f.dim() || !z.allFinite()) throw InputError("jump traces: invalid point");
        const JumpSet* jump = f.jumpSet();
        if (!jump)
        {
            const Point b = f(z);
            return {b, b, Point::Zero(z.size()), Point::Zero(z.size())};
        }
        if (jump->distance(f.support().clamp(z)) > tolerance)
            throw InputError("jump traces: point is farther than the tolerance from jump set '" + jump->name() + "'");
        JumpTraces t;
        t.minus = f.sideValue(Side::Minus, z);
        t.plus = f.sideValue(Side::Plus, z);
        t.normal = jump->normal(z);
        t.theta = t.plus - t.minus;
        return t;
    }

    double integrateDensity(const VectorField& f, const std::function<double(double)>& weight, int cellsPerAxis)
    {
        const Domain& box = f.support();
        const int d = box.dim();
        int total = 1;
        double volume = 1.0;
        for (int i = 0; i < d; ++i)
        {
            total *= cellsPerAxis;
            volume *= box.extent()[i] / cellsPerAxis;
        }
        double sum = 0.0;
        Point z(d);
        for (int flat = 0; flat < total; ++flat)
        {
            int rest = flat;
            for (int i = d - 1; i >= 0; --i)
            {
                z[i] = box.lower()[i] + (rest % cellsPerAxis + 0.5) * box.extent()[i] / cellsPerAxis;
                rest /= cellsPerAxis;
            }
            sum += weight(densityNoThrow(f, z));
        }
        return sum * volume;
    }

    double totalVariation(const VectorField& f, int cellsPerAxis, int surfaceNodes)
    {
        double total = integrateDensity(f, [](double m) { return m; }, cellsPerAxis);
        if (const JumpSet* jump = f.jumpSet())
        {
            for (const auto& node : jump->quadrature(f.support(), surfaceNodes))
                total += (f.sideValue(Side::Plus, node.point) - f.sideValue(Side::Minus, node.point)).norm() * node.weight;
        }
        return total;
    }
} // namespace flowlab
