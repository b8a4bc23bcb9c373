#pragma once

#include "flowlab/fields.hpp"
#include "flowlab/flow.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace flowlab
{
    /// Superlinear weight φ with φ(ξ)/ξ nondecreasing and unbounded.
    class PhiSpec
    {
    public:
        enum class Kind
        {
            Power,   ///< ξ^p
            Entropic ///< ξ log(1 + ξ)
        };

        static PhiSpec power(double p);
        static PhiSpec entropic();

        Kind kind() const { return kind_; }
        double exponent() const { return exponent_; }
        std::string describe() const;

        double operator()(double xi) const;

        /// Checks monotonicity and growth of φ(ξ)/ξ on a log-spaced sample of [1e-3, 1e9].
        bool isSuperlinear() const;

    private:
        PhiSpec(Kind kind, double exponent) : kind_(kind), exponent_(exponent) {}

        Kind kind_;
        double exponent_;
    };

    enum class PsiVariant
    {
        LinfInterpolation, ///< inf_M M + 2 (M/φ(M)) log(1/δ)
        LlogL              ///< inf_M M log M/φ(M) + 2 (M/φ(M)) log(1/δ); meaningful for φ(ξ) ≤ ξ log ξ
    };

    /// Golden-section minimisation over log M, M ∈ [1, 1e12].
    double psiModulus(const PhiSpec& phi, double delta, PsiVariant variant = PsiVariant::LinfInterpolation);

    /// Midpoint sum of log(1 + |X(t,x) - X(t,x+δ)|/|δ|) h^d over the primary nodes.
    double qDelta(const FlowGrid& grid, double t);

    /// ∫ sup_r avg_w log(1 + |X(t,x+rw) - X(t,x)|/r) dx; the sup sits inside the integral.
    /// Directions must be unit vectors with r·w on the lattice.
    double cdFunctional(const FlowGrid& grid, const std::vector<double>& radii, const std::vector<Point>& directions,
                        double t);

    /// ±e_i for every axis.
    std::vector<Point> axisDirections(int dim);

    /// Swaps [k/n, (2k+1)/2n] with the mirror of [(2k+1)/2n, (k+1)/n] for 1 ≤ k < n, on both
    /// signs of x; identity elsewhere.
    double bianchiniSwap(double x, int n);

    /// ∫_{-1}^{1} |b(X(x)) - b(X(x+δ))| / (δ + |X(x) - X(x+δ)|) dx with b the Heaviside
    /// step, δ = 1/(2n) and X the interval swap; `identityMap` replaces the swap by x.
    double bianchiniGap(int n, bool identityMap = false);

    struct LogFit
    {
        double intercept = 0.0;
        double slope = 0.0;
        double rSquared = 0.0;
    };

    /// Least squares value ≈ intercept + slope · log n.
    LogFit fitLogGrowth(const std::vector<double>& n, const std::vector<double>& values);

    struct TwoDTerms
    {
        double I = 0.0;
        double II = 0.0;
        double rhsI = 0.0;
        double rhsII = 0.0;
        double totalVariation = 0.0;
    };

    /// The two terms bounding Q_δ for drift fields in the plane, by rectangle rule over
    /// the stored samples on [0, t). Trajectories must reach X_1 levels up to 2t.
    TwoDTerms twoDTerms(const FlowGrid& grid, const VectorField& f, double t, double C, int workers = 1);

    struct ExceptionalSet
    {
        double eps = 0.0;
        std::vector<std::uint8_t> indicator; ///< per primary node
        std::size_t count = 0;
        double measure = 0.0;
    };

    /// Nodes whose separation from their partner exceeds eps at some recorded time.
    ExceptionalSet exceptionalSet(const FlowGrid& grid, double eps);

    enum class BoundForm
    {
        W11, ///< |Ω| log 2 + C t ψ(|δ|) ∫(1 + φ(|db|))
        TwoD ///< |Ω| log 2 + C (t + |δ|) ∫|db|
    };

    struct FunctionalRow
    {
        std::string scenario;
        double t = 0.0;
        double delta = 0.0;
        double Q = 0.0;
        double psi = 0.0;
        double growth = 0.0; ///< the factor multiplying C in the bound
        double rhs = 0.0;
        double Cemp = 0.0;
    };

    struct FunctionalReport
    {
        std::string scenario;
        BoundForm form = BoundForm::W11;
        double h = 0.0;
        double dt = 0.0;
        double base = 0.0;           ///< |Ω| log 2
        double weightIntegral = 0.0; ///< ∫(1 + φ(|db|)) or ∫|db|
        std::vector<FunctionalRow> rows;
    };

    /// Q_δ(t) table over the given shifts (each a multiple of h inside the grid halo).
    /// For every t the constant is fitted at the largest |δ|.
    FunctionalReport functionalReport(const FlowGrid& grid, const std::string& scenario, BoundForm form,
                                      const std::vector<double>& times, const std::vector<Point>& deltas,
                                      const std::optional<PhiSpec>& phi, double weightIntegral);

    /// True if every row satisfies Q ≤ base + slack · C_emp · growth.
    bool fittedBoundHolds(const FunctionalReport& report, double slack);
} // namespace flowlab
