#include "flowlab/errors.hpp"
#include "flowlab/fields.hpp"

#include <cmath>

namespace flowlab
{
    double bumpKernel(double radiusSquared)
    {
        if (radiusSquared >= 1.0) return 0.0;
        return std::exp(1.0 / (radiusSquared - 1.0));
    }

    int defaultStencilNodes(int dim)
    {
        // Even counts keep a node off the centre, so a jump through x is sampled symmetrically.
        switch (dim)
        {
        case 1: return 128;
        case 2: return 16;
        default: return 10;
        }
    }

    KernelStencil bumpStencil(int dim, int nodesPerAxis)
    {
        if (dim < 1 || dim > 3) throw InputError("kernel stencil: dimension must be 1, 2 or 3");
        if (nodesPerAxis < 2) throw InputError("kernel stencil: need at least two nodes per axis");
        KernelStencil stencil;
        const double cell = 2.0 / nodesPerAxis;
        int total = 1;
        for (int i = 0; i < dim; ++i) total *= nodesPerAxis;
        double mass = 0.0;
        for (int flat = 0; flat < total; ++flat)
        {
            Point u(dim);
            int rest = flat;
            for (int i = dim - 1; i >= 0; --i)
            {
                u[i] = -1.0 + (rest % nodesPerAxis + 0.5) * cell;
                rest /= nodesPerAxis;
            }
            const double w = bumpKernel(u.squaredNorm());
            if (w <= 0.0) continue;
            stencil.offsets.push_back(u);
            stencil.weights.push_back(w);
            mass += w;
        }
        for (double& w : stencil.weights) w /= mass;
        return stencil;
    }

    MollifiedField::MollifiedField(VectorField base, int n, int nodesPerAxis) : base_(std::move(base)), n_(n)
    {
        if (n < 1) throw InputError("mollify: index n must be at least 1");
        if (nodesPerAxis == 0) nodesPerAxis = defaultStencilNodes(base_.dim());
        stencil_ = std::make_shared<const KernelStencil>(bumpStencil(base_.dim(), nodesPerAxis));
    }

    Point MollifiedField::operator()(const Point& x) const
    {
        const double scale = 1.0 / n_;
        Point out = Point::Zero(x.size());
        const auto& offsets = stencil_->offsets;
        const auto& weights = stencil_->weights;
        for (std::size_t k = 0; k < weights.size(); ++k)
        {
            const Point y = x - scale * offsets[k];
            out += weights[k] * base_.sideValue(base_.side(y), y);
        }
        return out;
    }

    VectorField MollifiedField::field() const
    {
        SmoothMap map;
        map.value = [self = *this](const Point& x) { return self(x); };
        return VectorField::analytic(base_.name() + "_n" + std::to_string(n_), base_.support().inflated(1.0 / n_),
                                     std::move(map), base_.supBound(), base_.driftFlag(), Extension::None);
    }

    MollifiedField mollify(const VectorField& f, int n) { return MollifiedField(f, n); }
} // namespace flowlab
