#include "flowlab/compress.hpp"

#include "flowlab/errors.hpp"
#include "flowlab/parallel.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>

namespace flowlab
{
    namespace
    {
        constexpr double kDegenerateFlux = 1e-8;

        int signOf(double v) { return (v > 0.0) - (v < 0.0); }
    } // namespace

    JacobianEstimate jacobianFd(const FlowGrid& grid, double t, int workers)
    {
        const int k = grid.sampleIndex(t);
        const int d = grid.dim();
        const double h = grid.spacing();
        const auto& nodes = grid.primaryNodes();

        JacobianEstimate out;
        out.method = JacobianMethod::FiniteDifference;
        out.entries.resize(nodes.size());
        parallelFor(nodes.size(), workers, [&](std::size_t i) {
            const std::size_t center = nodes[i];
            JacobianEntry& entry = out.entries[i];
            entry.node = center;
            entry.t = t;
            const int centerEvents = grid.trajectory(center).eventsUpTo(t);
            Jacobian jac(d, d);
            bool mixed = false;
            for (int axis = 0; axis < d; ++axis)
            {
                const auto fwd = grid.neighbor(center, axis, +1);
                const auto bwd = grid.neighbor(center, axis, -1);
                if (!fwd || !bwd)
                {
                    entry.status = NodeStatus::Boundary;
                    entry.J = std::numeric_limits<double>::quiet_NaN();
                    return;
                }
                const Trajectory& a = grid.trajectory(*fwd);
                const Trajectory& b = grid.trajectory(*bwd);
                mixed = mixed || a.eventsUpTo(t) != centerEvents || b.eventsUpTo(t) != centerEvents;
                jac.col(axis) = (a.position(k) - b.position(k)) / (2.0 * h);
            }
            entry.J = jac.determinant();
            entry.status = mixed ? NodeStatus::MixedStencil : NodeStatus::Ok;
        });
        return out;
    }

    JacobianEstimate jacobianAlong(const VectorField& f, const Trajectory& traj, std::size_t node)
    {
        if (traj.dim() != f.dim()) throw InputError("jacobian along: trajectory and field dimensions differ");
        JacobianEstimate out;
        out.method = JacobianMethod::AlongTrajectory;

        double logJ = 0.0;
        double factor = 1.0;
        std::size_t nextEvent = 0;
        auto divergenceAt = [&](int k) {
            const Point x = traj.position(k);
            return f.sideDivergence(f.side(x), x);
        };

        double previousDiv = divergenceAt(0);
        out.entries.push_back({node, 0.0, 1.0, NodeStatus::Ok});
        for (int k = 1; k < traj.sampleCount(); ++k)
        {
            const double tk = traj.time(k);
            while (nextEvent < traj.events.size() && traj.events[nextEvent].time <= tk + 1e-12)
            {
                const CrossingEvent& e = traj.events[nextEvent++];
                double jump = 0.0;
                if (!e.stall)
                {
                    const double pre = e.preVelocity.dot(e.normal);
                    if (std::abs(pre) < kDegenerateFlux)
                        throw DegenerateCrossingError("jacobian along: incoming normal flux " + std::to_string(pre) +
                                                      " at t = " + std::to_string(e.time) + " violates transversality");
                    jump = e.postVelocity.dot(e.normal) / pre;
                }
                out.jumpFactors.push_back(jump);
                factor *= jump;
            }
            const double div = traj.stalled && traj.events.back().time <= tk ? 0.0 : divergenceAt(k);
            logJ += 0.5 * (previousDiv + div) * traj.sampleSpacing();
            previousDiv = div;
            out.entries.push_back({node, tk, std::exp(logJ) * factor, NodeStatus::Ok});
        }
        return out;
    }

    IncompressibilityReport incompressibilityCheck(const JacobianEstimate& jac, double C)
    {
        if (!(C >= 1.0)) throw InputError("incompressibility check: C must be at least 1");
        IncompressibilityReport report;
        report.C = C;
        double worstLog = -1.0;
        for (const auto& e : jac.entries)
        {
            if (e.status != NodeStatus::Ok) continue;
            ++report.evaluated;
            const double J = e.J;
            const double distance = J > 0.0 ? std::abs(std::log(J)) : std::numeric_limits<double>::infinity();
            if (distance > worstLog)
            {
                worstLog = distance;
                report.worstRatio = J;
            }
            // Relative slack for roundoff when J sits exactly on a bound.
            constexpr double slack = 1e-9;
            if (!(J >= (1.0 - slack) / C && J <= C * (1.0 + slack)))
            {
                report.pass = false;
                report.violations.push_back({e.node, e.t, J});
            }
        }
        return report;
    }

    double intervalImageMeasure(const FlowMap1d& map, Interval interval, double t, int samples)
    {
        if (!std::isfinite(interval.lo) || !std::isfinite(interval.hi) || interval.lo >= interval.hi)
            throw InputError("interval image: empty or non-finite interval");
        if (samples < 2) throw InputError("interval image: need at least two samples");
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int k = 0; k < samples; ++k)
        {
            const double x = k == samples - 1 ? interval.hi
                                              : interval.lo + interval.length() * k / static_cast<double>(samples - 1);
            const double y = map(t, x);
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
        return hi - lo;
    }

    double intervalImageMeasure(const VectorField& f, Interval interval, double t, double dt, int samples)
    {
        if (f.dim() != 1) throw InputError("interval image: field must be one-dimensional");
        FlowMap1d map = [&](double time, double x) {
            if (time == 0.0) return x;
            return integrate(f, makePoint({x}), time, std::min(dt, time)).terminal()[0];
        };
        return intervalImageMeasure(map, interval, t, samples);
    }

    WeakCompressibilityReport weakCompressibility(const FlowMap1d& map, Interval domain, double t, double Cw,
                                                  double delta)
    {
        if (!(Cw >= 1.0)) throw InputError("weak compressibility: C_w must be at least 1");
        if (!(delta > 0.0) || delta > domain.length()) throw InputError("weak compressibility: delta outside (0, |I|]");
        WeakCompressibilityReport r;
        r.Cw = Cw;
        r.delta = delta;
        r.separationBound = Cw * delta;
        r.infimumRatio = std::numeric_limits<double>::infinity();
        const int pieces = static_cast<int>(std::floor(domain.length() / delta + 1e-9));
        for (int k = 0; k < pieces; ++k)
        {
            const Interval piece{domain.lo + k * delta, domain.lo + (k + 1) * delta};
            r.infimumRatio = std::min(r.infimumRatio, intervalImageMeasure(map, piece, t, 33) / delta);
            r.maxSeparation = std::max(r.maxSeparation, std::abs(map(t, piece.hi) - map(t, piece.lo)));
        }
        r.pass = r.infimumRatio > 1.0 / Cw;
        r.separationPass = r.maxSeparation <= r.separationBound;
        return r;
    }

    TraceSignReport traceSignCheck(const VectorField& f, const JumpSet& jump, int samples, std::uint64_t seed)
    {
        if (f.kind() != VectorField::Kind::PiecewiseSmooth) throw InputError("trace sign check: field must be piecewise");
        TraceSignReport report;
        report.minRatio = std::numeric_limits<double>::quiet_NaN();
        for (const Point& z : jump.sample(f.support(), samples, seed))
        {
            const Point nu = jump.normal(z);
            const double fluxMinus = f.sideValue(Side::Minus, z).dot(nu);
            const double fluxPlus = f.sideValue(Side::Plus, z).dot(nu);
            TraceSample s;
            s.z = z;
            s.signMinus = signOf(fluxMinus);
            s.signPlus = signOf(fluxPlus);
            s.sameSign = s.signMinus == s.signPlus;
            s.ratio = fluxMinus != 0.0 ? fluxPlus / fluxMinus : std::numeric_limits<double>::quiet_NaN();
            report.allSameSign = report.allSameSign && s.sameSign;
            if (std::isfinite(s.ratio) && !(report.minRatio <= s.ratio)) report.minRatio = s.ratio;
            report.samples.push_back(s);
        }
        return report;
    }
} // namespace flowlab
