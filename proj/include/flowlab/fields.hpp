#pragma once

#include "flowlab/domain.hpp"
#include "flowlab/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace flowlab
{
    struct SurfaceNode
    {
        Point point;
        double weight = 0.0;
    };

    /// Jump hypersurface H = {g = 0} with normal ν = ∇g/|∇g| pointing to the Plus side.
    /// In one dimension a hyperplane is the single point {x = offset}.
    class JumpSet
    {
    public:
        static JumpSet hyperplane(const Point& normal, double offset, std::string name = "H");
        static JumpSet implicit(int dim, std::function<double(const Point&)> level,
                                std::function<Point(const Point&)> gradient, double lipschitz,
                                std::string name = "H");

        int dim() const { return dim_; }
        const std::string& name() const { return name_; }
        double lipschitz() const { return lipschitz_; }
        bool isHyperplane() const { return planeNormal_.has_value(); }

        double level(const Point& x) const;
        Point gradient(const Point& x) const;
        Point normal(const Point& x) const;
        /// First-order distance estimate |g|/|∇g|.
        double distance(const Point& x) const;

        /// Quadrature of H ∩ box: trapezoid along the segment for d = 2, midpoint
        /// on the tangent plane for d = 3, the point itself for d = 1.
        std::vector<SurfaceNode> quadrature(const Domain& box, int nodes) const;
        std::vector<SurfaceNode> quadratureInBall(const Point& center, double radius, int nodes) const;
        /// Seeded uniform points of H ∩ box.
        std::vector<Point> sample(const Domain& box, int count, std::uint64_t seed) const;

    private:
        JumpSet() = default;

        int dim_ = 0;
        std::string name_;
        double lipschitz_ = 1.0;
        std::function<double(const Point&)> level_;
        std::function<Point(const Point&)> gradient_;
        std::optional<Point> planeNormal_;
        double planeOffset_ = 0.0;
    };

    /// Smooth map with optional closed-form Jacobian (finite differences otherwise).
    struct SmoothMap
    {
        std::function<Point(const Point&)> value;
        std::function<Jacobian(const Point&)> jacobian;
    };

    /// Lattice values for a GridSampled field; vertex-centred nodes spanning the
    /// support box, row-major with the last axis fastest, `dim` components per node.
    struct GridSamples
    {
        std::vector<int> counts;
        std::vector<double> values;
    };

    struct FieldValue
    {
        Point value;
        bool onJump = false;
    };

    enum class Extension
    {
        Clamp, ///< constant along outward rays of the support box
        None
    };

    class VectorField
    {
    public:
        enum class Kind
        {
            AnalyticSmooth,
            PiecewiseSmooth,
            GridSampled
        };

        static VectorField analytic(std::string name, Domain support, SmoothMap map, double supBound,
                                    bool driftFlag = false, Extension extension = Extension::Clamp);
        /// `minus` applies where g ≤ 0, `plus` where g > 0.
        static VectorField piecewise(std::string name, Domain support, JumpSet jump, SmoothMap minus,
                                     SmoothMap plus, double supBound, bool driftFlag = false);
        static VectorField gridSampled(std::string name, Domain support, GridSamples samples);

        Kind kind() const;
        const std::string& name() const;
        int dim() const;
        const Domain& support() const;
        double supBound() const;
        bool driftFlag() const;
        bool hasJump() const { return jumpSet() != nullptr; }
        const JumpSet* jumpSet() const;
        double fdStep() const;

        /// Checked evaluation; on the jump set the Minus value is returned and flagged.
        FieldValue evaluate(const Point& x) const;
        Point operator()(const Point& x) const { return evaluate(x).value; }

        Side side(const Point& x) const;
        /// Value of the sub-field of side `s` (the whole field if there is no jump).
        Point sideValue(Side s, const Point& x) const;
        Jacobian sideJacobian(Side s, const Point& x) const;

        /// Jacobian of the absolutely continuous part; throws SingularPointError on H.
        Jacobian jacobian(const Point& x) const;
        double divergence(const Point& x) const { return jacobian(x).trace(); }
        double sideDivergence(Side s, const Point& x) const { return sideJacobian(s, x).trace(); }

        /// Field with the opposite velocity, for backward-time flows.
        VectorField reversed() const;

    private:
        struct Impl;
        explicit VectorField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
        Point extend(const Point& x) const;

        std::shared_ptr<const Impl> impl_;
    };

    /// Frobenius norm of the absolutely continuous derivative |db|(x).
    double gradNormDensity(const VectorField& f, const Point& x);

    /// Same density, evaluated on the side of x (points on H use the Minus side).
    double densityNoThrow(const VectorField& f, const Point& x);

    // --- mollification -------------------------------------------------------

    /// exp(1/(|u|²-1)) on the unit ball, unnormalised.
    double bumpKernel(double radiusSquared);

    struct KernelStencil
    {
        std::vector<Point> offsets;
        std::vector<double> weights; ///< sum to one
    };

    /// Midpoint nodes of the cube [-1,1]^d kept inside the unit ball.
    KernelStencil bumpStencil(int dim, int nodesPerAxis);
    int defaultStencilNodes(int dim);

    class MollifiedField
    {
    public:
        MollifiedField(VectorField base, int n, int nodesPerAxis = 0);

        int index() const { return n_; }
        const VectorField& base() const { return base_; }
        double supBound() const { return base_.supBound(); }

        Point operator()(const Point& x) const;
        /// Smooth field view, suitable for the integrators.
        VectorField field() const;

    private:
        VectorField base_;
        int n_;
        std::shared_ptr<const KernelStencil> stencil_;
    };

    MollifiedField mollify(const VectorField& f, int n);

    // --- derivative-mass bounds ----------------------------------------------

    /// sup over `radii` of the averaged density over B(x, r), midpoint quadrature
    /// with `cellsPerAxis` cells across the ball's bounding cube.
    double maximalFunction(const VectorField& f, const Point& x, const std::vector<double>& radii,
                           int cellsPerAxis = 32);

    /// Radii diameter·2^{-k}, k = 0..count-1.
    std::vector<double> dyadicRadii(double diameter, int count);

    struct BoundPair
    {
        double lhs = 0.0;
        double rhs = 0.0;
    };

    /// |b(x) - b(y)| against ∫_{B(x,y)} |db|(z)(|x-z|^{1-d} + |y-z|^{1-d}) dz. The jump
    /// part of |db| inside the ball is added for piecewise fields.
    BoundPair kernelDifferenceBound(const VectorField& f, const Point& x, const Point& y,
                                    int cellsPerAxis = 32);

    /// Same comparison on the ball of diameter K|x-y|, cells meeting H excluded;
    /// x and y must lie on the same side of H.
    BoundPair kernelDifferenceBoundAvoiding(const VectorField& f, const Point& x, const Point& y,
                                            const JumpSet& jump, double K, int cellsPerAxis = 32);

    struct JumpTraces
    {
        Point minus;
        Point plus;
        Point normal; ///< zero vector for fields without a jump set
        Point theta;
    };

    JumpTraces jumpTraces(const VectorField& f, const Point& z, double tolerance = 1e-8);

    /// ∫_Ω weight(|db|) dx over the support by midpoint quadrature.
    double integrateDensity(const VectorField& f, const std::function<double(double)>& weight,
                            int cellsPerAxis);

    /// ∫|db|: a.c. part by volume quadrature plus ∫_H |θ| by surface quadrature.
    double totalVariation(const VectorField& f, int cellsPerAxis = 256, int surfaceNodes = 1000);

    /// GridSampled field from CSV: a header line "d,n_1,...,n_d" followed by one
    /// row of d components per node in row-major order.
    VectorField loadGridField(const std::string& path, const Domain& support, const std::string& name = "grid");
    void saveGridField(const std::string& path, const GridSamples& samples, int dim);
} // namespace flowlab
