#include "flowlab/flow.hpp"

#include "flowlab/errors.hpp"
#include "flowlab/parallel.hpp"

#include <cmath>
#include <string>

namespace flowlab
{
    namespace
    {
        constexpr int kMaxCrossingsPerStep = 16;

        Point rk4(const VectorField& f, Side s, const Point& x, double h)
        {
            const Point k1 = f.sideValue(s, x);
            const Point k2 = f.sideValue(s, x + 0.5 * h * k1);
            const Point k3 = f.sideValue(s, x + 0.5 * h * k2);
            const Point k4 = f.sideValue(s, x + h * k3);
            return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }

        double levelAt(const VectorField& f, const Point& x) { return f.jumpSet()->level(f.support().clamp(x)); }

        struct Stepper
        {
            const VectorField& f;
            const IntegrateOptions& options;
            Trajectory& traj;
            Side side;
            Point x;

            // Advances x by h starting at time t, splitting the step at every crossing.
            void step(double t, double h)
            {
                double done = 0.0;
                int crossings = 0;
                while (done < h)
                {
                    const double remaining = h - done;
                    Point y = rk4(f, side, x, remaining);
                    if (!f.hasJump() || f.side(y) == side)
                    {
                        x = y;
                        return;
                    }

                    double lo = 0.0;
                    double hi = remaining;
                    Point crossed = y;
                    for (int it = 0; it < options.maxBisection && std::abs(levelAt(f, crossed)) > options.eventTolerance;
                         ++it)
                    {
                        const double mid = 0.5 * (lo + hi);
                        Point ym = rk4(f, side, x, mid);
                        if (f.side(ym) != side)
                        {
                            hi = mid;
                            crossed = ym;
                        }
                        else
                        {
                            lo = mid;
                        }
                    }

                    const Side next = opposite(side);
                    CrossingEvent event;
                    event.time = t + done + hi;
                    event.point = crossed;
                    event.preVelocity = f.sideValue(side, crossed);
                    event.postVelocity = f.sideValue(next, crossed);
                    event.normal = f.jumpSet()->normal(f.support().clamp(crossed));
                    const double outward = event.postVelocity.dot(event.normal);
                    const bool entersNext = next == Side::Plus ? outward > 0.0 : outward < 0.0;
                    if (!entersNext || ++crossings > kMaxCrossingsPerStep)
                    {
                        event.stall = true;
                        traj.events.push_back(event);
                        traj.stalled = true;
                        x = crossed;
                        return;
                    }
                    traj.events.push_back(event);
                    side = next;
                    x = crossed;
                    done += hi;
                }
            }
        };
    } // namespace

    Point Trajectory::positionAt(double t) const
    {
        const int last = sampleCount() - 1;
        if (last <= 0) return position(0);
        const double u = std::clamp(t / sampleSpacing(), 0.0, static_cast<double>(last));
        const int k = std::min(static_cast<int>(std::floor(u)), last - 1);
        const double w = u - k;
        return (1.0 - w) * positions.col(k) + w * positions.col(k + 1);
    }

    int Trajectory::eventsUpTo(double t) const
    {
        int count = 0;
        for (const auto& e : events)
        {
            if (e.time <= t + 1e-12) ++count;
        }
        return count;
    }

    Trajectory integrate(const VectorField& f, const Point& x0, double T, double dt, const IntegrateOptions& options)
    {
        if (x0.size() != f.dim() || !x0.allFinite()) throw InputError("integrate: invalid initial point");
        if (!(dt > 0.0) || !std::isfinite(T) || T < dt * (1.0 - 1e-12))
            throw InputError("integrate: need dt > 0 and T >= dt");
        if (options.recordStride < 1) throw InputError("integrate: record stride must be positive");
        const long steps = std::max(1L, std::lround(T / dt));
        if (steps % options.recordStride != 0)
            throw InputError("integrate: step count " + std::to_string(steps) + " is not a multiple of the record stride");
        const double h = T / static_cast<double>(steps);

        Trajectory traj;
        traj.initial = x0;
        traj.dt = h;
        traj.stride = options.recordStride;
        traj.positions.resize(x0.size(), steps / options.recordStride + 1);
        traj.positions.col(0) = x0;

        Stepper stepper{f, options, traj, f.side(x0), x0};
        for (long k = 0; k < steps; ++k)
        {
            if (!traj.stalled) stepper.step(static_cast<double>(k) * h, h);
            if (!stepper.x.allFinite())
                throw DomainEscapeError("integrate: trajectory of field '" + f.name() + "' left the extension domain at t = " +
                                        std::to_string((k + 1) * h));
            if ((k + 1) % options.recordStride == 0) traj.positions.col((k + 1) / options.recordStride) = stepper.x;
        }
        return traj;
    }

    Trajectory integrate(const MollifiedField& f, const Point& x0, double T, double dt, const IntegrateOptions& options)
    {
        return integrate(f.field(), x0, T, dt, options);
    }

    // --- FlowGrid ---------------------------------------------------------------

    LatticeIndex FlowGrid::latticeOffset(const Point& delta, double h)
    {
        LatticeIndex offset{0, 0, 0};
        if (!delta.allFinite() || delta.norm() == 0.0) throw InputError("flow grid: shift must be finite and nonzero");
        for (Eigen::Index i = 0; i < delta.size(); ++i)
        {
            const double q = delta[i] / h;
            const long o = std::lround(q);
            if (std::abs(q - static_cast<double>(o)) > 1e-9)
                throw InputError("flow grid: shift component " + std::to_string(delta[i]) +
                                 " is not a multiple of the spacing " + std::to_string(h));
            offset[static_cast<std::size_t>(i)] = static_cast<int>(o);
        }
        return offset;
    }

    int FlowGrid::sampleCount() const
    {
        return trajectories_->empty() ? 0 : (*trajectories_)[0].sampleCount();
    }

    int FlowGrid::sampleIndex(double t) const
    {
        const double q = t / sampleSpacing();
        const long k = std::lround(q);
        if (std::abs(q - static_cast<double>(k)) > 1e-9 || k < 0 || k >= sampleCount())
            throw InputError("flow grid: time " + std::to_string(t) + " is not on the recorded time grid");
        return static_cast<int>(k);
    }

    std::size_t FlowGrid::primaryCount() const { return primary_->size(); }

    LatticeIndex FlowGrid::lattice(std::size_t flat) const
    {
        LatticeIndex idx{0, 0, 0};
        for (int i = dim() - 1; i >= 0; --i)
        {
            const auto n = static_cast<std::size_t>(extent_[i]);
            idx[i] = static_cast<int>(flat % n) + low_[i];
            flat /= n;
        }
        return idx;
    }

    std::optional<std::size_t> FlowGrid::flat(const LatticeIndex& index) const
    {
        std::size_t out = 0;
        for (int i = 0; i < dim(); ++i)
        {
            const int local = index[i] - low_[i];
            if (local < 0 || local >= extent_[i]) return std::nullopt;
            out = out * static_cast<std::size_t>(extent_[i]) + static_cast<std::size_t>(local);
        }
        return out;
    }

    bool FlowGrid::isPrimary(std::size_t flat) const
    {
        const auto idx = lattice(flat);
        for (int i = 0; i < dim(); ++i)
        {
            if (idx[i] < 0 || idx[i] >= cells_[i]) return false;
        }
        return true;
    }

    Point FlowGrid::node(const LatticeIndex& index) const
    {
        Point x(dim());
        for (int i = 0; i < dim(); ++i) x[i] = domain_.lower()[i] + (index[i] + 0.5) * h_;
        return x;
    }

    Point FlowGrid::node(std::size_t flat) const { return node(lattice(flat)); }

    std::optional<std::size_t> FlowGrid::neighbor(std::size_t flatIndex, int axis, int step) const
    {
        auto idx = lattice(flatIndex);
        idx[axis] += step;
        return flat(idx);
    }

    std::optional<std::size_t> FlowGrid::partner(std::size_t flatIndex) const
    {
        if (!shift_) return std::nullopt;
        auto idx = lattice(flatIndex);
        for (int i = 0; i < dim(); ++i) idx[i] += shiftOffset_[i];
        return flat(idx);
    }

    FlowGrid FlowGrid::withShift(const Point& delta) const
    {
        if (delta.size() != dim()) throw InputError("flow grid: shift has the wrong dimension");
        const auto offset = latticeOffset(delta, h_);
        for (int i = 0; i < dim(); ++i)
        {
            if (offset[i] < low_[i] || cells_[i] - 1 + offset[i] >= low_[i] + extent_[i])
                throw InputError("flow grid: shift leaves the lattice halo; rebuild the grid with this shift");
        }
        FlowGrid out = *this;
        out.shift_ = delta;
        out.shiftOffset_ = offset;
        return out;
    }

    FlowGrid flowGrid(const VectorField& f, const Domain& domain, double h, double T, double dt,
                      const std::optional<Point>& delta, const FlowGridOptions& options)
    {
        if (domain.dim() != f.dim()) throw InputError("flow grid: domain and field dimensions differ");
        if (!(h > 0.0)) throw InputError("flow grid: spacing must be positive");
        if (options.halo < 0) throw InputError("flow grid: halo must be nonnegative");

        FlowGrid grid(domain, h);
        const int d = domain.dim();
        for (int i = 0; i < d; ++i)
        {
            const double q = domain.extent()[i] / h;
            const long n = std::lround(q);
            if (n < 1 || std::abs(q - static_cast<double>(n)) > 1e-9 * std::max(1.0, q))
                throw InputError("flow grid: spacing does not divide the domain extent on axis " + std::to_string(i));
            grid.cells_[i] = static_cast<int>(n);
        }
        LatticeIndex offset{0, 0, 0};
        if (delta)
        {
            if (delta->size() != d) throw InputError("flow grid: shift has the wrong dimension");
            offset = FlowGrid::latticeOffset(*delta, h);
            grid.shift_ = *delta;
            grid.shiftOffset_ = offset;
        }

        double total = 1.0;
        for (int i = 0; i < d; ++i)
        {
            grid.low_[i] = -options.halo - std::max(0, -offset[i]);
            const int high = grid.cells_[i] + options.halo + std::max(0, offset[i]);
            grid.extent_[i] = high - grid.low_[i];
            total *= grid.extent_[i];
        }
        if (total > static_cast<double>(options.nodeBudget))
            throw CapacityError("flow grid: " + std::to_string(static_cast<long long>(total)) +
                                " nodes exceed the budget of " + std::to_string(options.nodeBudget));

        const auto count = static_cast<std::size_t>(total);
        auto trajectories = std::make_shared<std::vector<Trajectory>>(count);
        auto primary = std::make_shared<std::vector<std::size_t>>();
        for (std::size_t k = 0; k < count; ++k)
        {
            if (grid.isPrimary(k)) primary->push_back(k);
        }
        IntegrateOptions integrateOptions;
        integrateOptions.recordStride = options.recordStride;
        parallelFor(count, options.workers,
                    [&](std::size_t k) { (*trajectories)[k] = integrate(f, grid.node(k), T, dt, integrateOptions); });

        grid.trajectories_ = std::move(trajectories);
        grid.primary_ = std::move(primary);
        grid.horizon_ = T;
        grid.dt_ = (*grid.trajectories_)[0].dt;
        grid.stride_ = options.recordStride;
        return grid;
    }

    double semigroupCheck(const VectorField& f, const Point& x0, double s, double t, double dt)
    {
        if (!(s >= 0.0) || !(t >= 0.0)) throw InputError("semigroup check: times must be nonnegative");
        auto endpoint = [&](const Point& x, double T) -> Point {
            if (T == 0.0) return x;
            return integrate(f, x, T, std::min(dt, T)).terminal();
        };
        const Point direct = endpoint(x0, s + t);
        const Point composed = endpoint(endpoint(x0, s), t);
        return (direct - composed).norm();
    }

    double crossingTime(const Trajectory& trajX, const Trajectory& trajShifted, double t)
    {
        if (t < 0.0 || t > trajShifted.horizon() * (1.0 + 1e-12))
            throw RangeError("crossing time: t outside the shifted trajectory's horizon");
        const double target = trajShifted.positionAt(t)[0];
        const int last = trajX.sampleCount() - 1;
        const double first = trajX.positions(0, 0);
        const double final = trajX.positions(0, last);
        if (target < first || target > final)
            throw RangeError("crossing time: level X_1 = " + std::to_string(target) + " outside the sampled range [" +
                             std::to_string(first) + ", " + std::to_string(final) + "]");
        int lo = 0;
        int hi = last;
        while (hi - lo > 1)
        {
            const int mid = (lo + hi) / 2;
            if (trajX.positions(0, mid) <= target)
                lo = mid;
            else
                hi = mid;
        }
        const double a = trajX.positions(0, lo);
        const double b = trajX.positions(0, hi);
        const double w = b > a ? (target - a) / (b - a) : 0.0;
        return trajX.time(lo) + w * trajX.sampleSpacing();
    }
} // namespace flowlab
