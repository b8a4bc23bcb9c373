#pragma once

#include "flowlab/fields.hpp"
#include "flowlab/flow.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace flowlab
{
    enum class JacobianMethod
    {
        FiniteDifference,
        AlongTrajectory
    };

    enum class NodeStatus
    {
        Ok,
        Boundary,    ///< stencil leaves the lattice
        MixedStencil ///< stencil nodes disagree on the number of crossings so far
    };

    struct JacobianEntry
    {
        std::size_t node = 0;
        double t = 0.0;
        double J = 1.0;
        NodeStatus status = NodeStatus::Ok;
    };

    /// det d_x X per node and time. Only Ok entries count in pass/fail statistics.
    struct JacobianEstimate
    {
        JacobianMethod method = JacobianMethod::FiniteDifference;
        std::vector<JacobianEntry> entries;
        std::vector<double> jumpFactors; ///< along-trajectory only, in crossing order
    };

    /// Central differences (X(t, x + h e_i) - X(t, x - h e_i)) / 2h at every primary node.
    JacobianEstimate jacobianFd(const FlowGrid& grid, double t, int workers = 1);

    /// exp(∫ div b(X) ds) times (b⁺·ν)/(b⁻·ν) for each crossing, pre-side in the
    /// denominator; one entry per recorded sample. A stall contributes a factor 0.
    JacobianEstimate jacobianAlong(const VectorField& f, const Trajectory& traj, std::size_t node = 0);

    struct Violation
    {
        std::size_t node = 0;
        double t = 0.0;
        double J = 0.0;
    };

    struct IncompressibilityReport
    {
        double C = 1.0;
        bool pass = true;
        /// J farthest from 1 in the log sense.
        double worstRatio = 1.0;
        std::size_t evaluated = 0;
        std::vector<Violation> violations;
    };

    /// Passes iff 1/C ≤ J ≤ C at every Ok entry, up to a relative roundoff of 1e-9.
    IncompressibilityReport incompressibilityCheck(const JacobianEstimate& jac, double C);

    using FlowMap1d = std::function<double(double t, double x)>;

    struct Interval
    {
        double lo = 0.0;
        double hi = 0.0;
        double length() const { return hi - lo; }
    };

    /// |X(t, I)| as max - min over `samples` equally spaced images (endpoints included);
    /// the image of an interval under a continuous map is the interval they span.
    double intervalImageMeasure(const FlowMap1d& map, Interval interval, double t, int samples = 1025);
    double intervalImageMeasure(const VectorField& f, Interval interval, double t, double dt, int samples = 1025);

    /// Weak compressibility with φ(ξ) = ξ / C_w, probed on the partition of `domain`
    /// into intervals of length δ, and the separation |X(t,x+δ) - X(t,x)| against φ⁻¹(δ) = C_w δ.
    struct WeakCompressibilityReport
    {
        double Cw = 1.0;
        double delta = 0.0;
        double infimumRatio = 0.0; ///< inf |X(t,I)| / |I|
        bool pass = false;
        double maxSeparation = 0.0;
        double separationBound = 0.0;
        bool separationPass = false;
    };

    WeakCompressibilityReport weakCompressibility(const FlowMap1d& map, Interval domain, double t, double Cw,
                                                  double delta);

    struct TraceSample
    {
        Point z;
        int signMinus = 0;
        int signPlus = 0;
        bool sameSign = true;
        double ratio = 0.0; ///< (b⁺·ν)/(b⁻·ν); NaN when b⁻·ν = 0
    };

    struct TraceSignReport
    {
        std::vector<TraceSample> samples;
        bool allSameSign = true;
        double minRatio = 0.0; ///< NaN when no sample has a defined ratio
    };

    TraceSignReport traceSignCheck(const VectorField& f, const JumpSet& jump, int samples, std::uint64_t seed = 7);
} // namespace flowlab
