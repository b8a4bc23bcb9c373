#pragma once

#include "flowlab/domain.hpp"
#include "flowlab/fields.hpp"
#include "flowlab/types.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace flowlab
{
    struct CrossingEvent
    {
        double time = 0.0;
        Point point;
        Point preVelocity;
        Point postVelocity;
        Point normal;
        /// The far side pushes back onto H; the trajectory is held there from now on.
        bool stall = false;
    };

    struct IntegrateOptions
    {
        int recordStride = 1;
        double eventTolerance = 1e-12;
        int maxBisection = 100;
    };

    /// Solution curve sampled every `stride` steps of size `dt` on [0, T].
    struct Trajectory
    {
        Point initial;
        double dt = 0.0;
        int stride = 1;
        Eigen::MatrixXd positions; ///< dim × samples
        std::vector<CrossingEvent> events;
        bool stalled = false;

        int dim() const { return static_cast<int>(positions.rows()); }
        int sampleCount() const { return static_cast<int>(positions.cols()); }
        double sampleSpacing() const { return dt * stride; }
        double time(int k) const { return k * sampleSpacing(); }
        double horizon() const { return time(sampleCount() - 1); }
        Point position(int k) const { return positions.col(k); }
        Point terminal() const { return positions.col(positions.cols() - 1); }
        /// Linear interpolation between samples; t is clamped to [0, T].
        Point positionAt(double t) const;
        int eventsUpTo(double t) const;
    };

    /// Classical fourth-order integration of ∂_t X = b(X), X(0) = x0. For piecewise
    /// fields each step uses the sub-field of the current side; sign changes of g are
    /// located by bisection and the step is split there.
    Trajectory integrate(const VectorField& f, const Point& x0, double T, double dt, const IntegrateOptions& options = {});
    Trajectory integrate(const MollifiedField& f, const Point& x0, double T, double dt,
                         const IntegrateOptions& options = {});

    struct FlowGridOptions
    {
        /// Extra layers of nodes around the primary lattice (central differences need 1).
        int halo = 0;
        int recordStride = 1;
        int workers = 1;
        std::size_t nodeBudget = 10'000'000;
    };

    using LatticeIndex = std::array<int, 3>;

    /// Trajectories from the cell-centred lattice of spacing h over the domain, plus
    /// halo nodes so that x + δ is a lattice node for every primary x.
    class FlowGrid
    {
    public:
        int dim() const { return domain_.dim(); }
        const Domain& domain() const { return domain_; }
        double spacing() const { return h_; }
        double horizon() const { return horizon_; }
        double dt() const { return dt_; }
        int recordStride() const { return stride_; }
        int sampleCount() const;
        double sampleSpacing() const { return dt_ * stride_; }
        /// Index of the recorded sample at time t; throws InputError if t is off the grid.
        int sampleIndex(double t) const;

        /// Primary cells per axis.
        const LatticeIndex& cells() const { return cells_; }
        std::size_t nodeCount() const { return trajectories_->size(); }
        std::size_t primaryCount() const;
        /// Primary nodes in lattice order (first axis slowest).
        const std::vector<std::size_t>& primaryNodes() const { return *primary_; }

        LatticeIndex lattice(std::size_t flat) const;
        std::optional<std::size_t> flat(const LatticeIndex& index) const;
        bool isPrimary(std::size_t flat) const;
        Point node(std::size_t flat) const;
        Point node(const LatticeIndex& index) const;
        const Trajectory& trajectory(std::size_t flat) const { return (*trajectories_)[flat]; }
        std::optional<std::size_t> neighbor(std::size_t flat, int axis, int step) const;

        const std::optional<Point>& shift() const { return shift_; }
        const LatticeIndex& shiftOffset() const { return shiftOffset_; }
        std::optional<std::size_t> partner(std::size_t flat) const;
        /// Same trajectories paired with another shift; every primary node must have its partner.
        FlowGrid withShift(const Point& delta) const;

        /// Lattice offset of δ; throws InputError when δ is not a multiple of h.
        static LatticeIndex latticeOffset(const Point& delta, double h);

    private:
        friend FlowGrid flowGrid(const VectorField&, const Domain&, double, double, double, const std::optional<Point>&,
                                 const FlowGridOptions&);
        FlowGrid(Domain domain, double h) : domain_(std::move(domain)), h_(h) {}

        Domain domain_;
        double h_ = 0.0;
        double horizon_ = 0.0;
        double dt_ = 0.0;
        int stride_ = 1;
        LatticeIndex cells_{1, 1, 1};
        LatticeIndex low_{0, 0, 0};
        LatticeIndex extent_{1, 1, 1};
        std::shared_ptr<const std::vector<Trajectory>> trajectories_;
        std::shared_ptr<const std::vector<std::size_t>> primary_;
        std::optional<Point> shift_;
        LatticeIndex shiftOffset_{0, 0, 0};
    };

    FlowGrid flowGrid(const VectorField& f, const Domain& domain, double h, double T, double dt,
                      const std::optional<Point>& delta = std::nullopt, const FlowGridOptions& options = {});

    /// |X(t+s, x0) - X(t, X(s, x0))| under the same integrator.
    double semigroupCheck(const VectorField& f, const Point& x0, double s, double t, double dt);

    /// Time t_δ with X_1(t_δ, x) = X_1(t, x + δ), from the stored samples.
    double crossingTime(const Trajectory& trajX, const Trajectory& trajShifted, double t);
} // namespace flowlab
