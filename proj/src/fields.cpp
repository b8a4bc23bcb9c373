#include "flowlab/fields.hpp"

#include "flowlab/errors.hpp"
#include "flowlab/random.hpp"

#include <cmath>
#include <utility>

namespace flowlab
{
    namespace
    {
        // Orthonormal tangent basis of the hyperplane with unit normal n.
        std::vector<Point> tangentBasis(const Point& n)
        {
            const int d = static_cast<int>(n.size());
            std::vector<Point> basis;
            if (d == 2)
            {
                basis.push_back(makePoint({-n[1], n[0]}));
            }
            else if (d == 3)
            {
                Point seed = Point::Zero(3);
                Eigen::Index smallest = 0;
                n.cwiseAbs().minCoeff(&smallest);
                seed[smallest] = 1.0;
                Point t1 = seed - seed.dot(n) * n;
                t1.normalize();
                Point t2(3);
                t2 << n[1] * t1[2] - n[2] * t1[1], n[2] * t1[0] - n[0] * t1[2], n[0] * t1[1] - n[1] * t1[0];
                basis.push_back(t1);
                basis.push_back(t2);
            }
            return basis;
        }

        // Parameter interval of {p0 + s·t} inside the box; empty if lo > hi.
        std::pair<double, double> clipLine(const Point& p0, const Point& t, const Domain& box)
        {
            double lo = -std::numeric_limits<double>::infinity();
            double hi = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < p0.size(); ++i)
            {
                if (std::abs(t[i]) < 1e-15)
                {
                    if (p0[i] < box.lower()[i] || p0[i] > box.upper()[i]) return {1.0, 0.0};
                    continue;
                }
                double a = (box.lower()[i] - p0[i]) / t[i];
                double b = (box.upper()[i] - p0[i]) / t[i];
                if (a > b) std::swap(a, b);
                lo = std::max(lo, a);
                hi = std::min(hi, b);
            }
            return {lo, hi};
        }

        std::vector<SurfaceNode> trapezoid(const Point& p0, const Point& t, double lo, double hi, int nodes)
        {
            std::vector<SurfaceNode> out;
            if (!(hi > lo)) return out;
            nodes = std::max(nodes, 2);
            const double step = (hi - lo) / (nodes - 1);
            out.reserve(static_cast<std::size_t>(nodes));
            for (int k = 0; k < nodes; ++k)
            {
                const double w = (k == 0 || k == nodes - 1) ? 0.5 * step : step;
                out.push_back({p0 + (lo + k * step) * t, w});
            }
            return out;
        }

        template <typename Inside>
        std::vector<SurfaceNode> planarMidpoint(const Point& p0, const std::vector<Point>& tangents, double halfWidth,
                                                int nodes, Inside&& inside)
        {
            std::vector<SurfaceNode> out;
            nodes = std::max(nodes, 2);
            const double cell = 2.0 * halfWidth / nodes;
            for (int i = 0; i < nodes; ++i)
            {
                for (int j = 0; j < nodes; ++j)
                {
                    const double u = -halfWidth + (i + 0.5) * cell;
                    const double v = -halfWidth + (j + 0.5) * cell;
                    Point z = p0 + u * tangents[0] + v * tangents[1];
                    if (inside(z)) out.push_back({z, cell * cell});
                }
            }
            return out;
        }

        Jacobian finiteDifferenceJacobian(const std::function<Point(const Point&)>& fn, const Point& x, double h)
        {
            const Eigen::Index d = x.size();
            Jacobian jac(d, d);
            for (Eigen::Index j = 0; j < d; ++j)
            {
                Point xp = x;
                Point xm = x;
                xp[j] += h;
                xm[j] -= h;
                jac.col(j) = (fn(xp) - fn(xm)) / (2.0 * h);
            }
            return jac;
        }
    } // namespace

    // --- JumpSet --------------------------------------------------------------

    JumpSet JumpSet::hyperplane(const Point& normal, double offset, std::string name)
    {
        const double len = normal.norm();
        if (normal.size() < 1 || normal.size() > 3 || !(len > 0.0) || !std::isfinite(offset))
            throw InputError("jump set: hyperplane needs a nonzero normal in dimension 1-3");
        JumpSet h;
        h.dim_ = static_cast<int>(normal.size());
        h.name_ = std::move(name);
        h.lipschitz_ = 1.0;
        const Point n = normal / len;
        const double c = offset / len;
        h.planeNormal_ = n;
        h.planeOffset_ = c;
        h.level_ = [n, c](const Point& x) { return n.dot(x) - c; };
        h.gradient_ = [n](const Point&) { return n; };
        return h;
    }

    JumpSet JumpSet::implicit(int dim, std::function<double(const Point&)> level, std::function<Point(const Point&)> gradient,
                              double lipschitz, std::string name)
    {
        if (dim < 1 || dim > 3 || !level || !gradient || !(lipschitz > 0.0))
            throw InputError("jump set: implicit representation needs level, gradient and a positive Lipschitz constant");
        JumpSet h;
        h.dim_ = dim;
        h.name_ = std::move(name);
        h.lipschitz_ = lipschitz;
        h.level_ = std::move(level);
        h.gradient_ = std::move(gradient);
        return h;
    }

    double JumpSet::level(const Point& x) const { return level_(x); }

    Point JumpSet::gradient(const Point& x) const { return gradient_(x); }

    Point JumpSet::normal(const Point& x) const
    {
        Point g = gradient_(x);
        const double len = g.norm();
        if (!(len > 0.0)) throw SingularPointError("jump set '" + name_ + "': vanishing gradient, normal undefined");
        return g / len;
    }

    double JumpSet::distance(const Point& x) const
    {
        const double len = gradient_(x).norm();
        return len > 0.0 ? std::abs(level_(x)) / len : std::abs(level_(x));
    }

    std::vector<SurfaceNode> JumpSet::quadrature(const Domain& box, int nodes) const
    {
        if (!isHyperplane()) throw InputError("jump set '" + name_ + "': surface quadrature needs a hyperplane");
        const Point& n = *planeNormal_;
        const Point p0 = box.center() - (n.dot(box.center()) - planeOffset_) * n;
        if (dim_ == 1)
        {
            if (box.contains(p0)) return {{p0, 1.0}};
            return {};
        }
        const auto tangents = tangentBasis(n);
        if (dim_ == 2)
        {
            const auto [lo, hi] = clipLine(p0, tangents[0], box);
            return trapezoid(p0, tangents[0], lo, hi, nodes);
        }
        return planarMidpoint(p0, tangents, 0.5 * box.diameter(), nodes, [&](const Point& z) { return box.contains(z); });
    }

    std::vector<SurfaceNode> JumpSet::quadratureInBall(const Point& center, double radius, int nodes) const
    {
        if (!isHyperplane()) throw InputError("jump set '" + name_ + "': surface quadrature needs a hyperplane");
        const Point& n = *planeNormal_;
        const double dist = n.dot(center) - planeOffset_;
        if (std::abs(dist) >= radius) return {};
        const Point p0 = center - dist * n;
        const double chord = std::sqrt(radius * radius - dist * dist);
        if (dim_ == 1) return {{p0, 1.0}};
        const auto tangents = tangentBasis(n);
        if (dim_ == 2) return trapezoid(p0, tangents[0], -chord, chord, nodes);
        return planarMidpoint(p0, tangents, chord, nodes,
                              [&](const Point& z) { return (z - p0).squaredNorm() < chord * chord; });
    }

    std::vector<Point> JumpSet::sample(const Domain& box, int count, std::uint64_t seed) const
    {
        if (!isHyperplane()) throw InputError("jump set '" + name_ + "': sampling needs a hyperplane");
        std::vector<Point> out;
        if (count <= 0) return out;
        const Point& n = *planeNormal_;
        const Point p0 = box.center() - (n.dot(box.center()) - planeOffset_) * n;
        Rng rng(seed);
        if (dim_ == 1)
        {
            if (!box.contains(p0)) throw InputError("jump set '" + name_ + "' does not meet the box");
            out.assign(static_cast<std::size_t>(count), p0);
            return out;
        }
        const auto tangents = tangentBasis(n);
        if (dim_ == 2)
        {
            const auto [lo, hi] = clipLine(p0, tangents[0], box);
            if (!(hi > lo)) throw InputError("jump set '" + name_ + "' does not meet the box");
            for (int k = 0; k < count; ++k) out.push_back(p0 + rng.uniform(lo, hi) * tangents[0]);
            return out;
        }
        const double half = 0.5 * box.diameter();
        int attempts = 0;
        while (static_cast<int>(out.size()) < count)
        {
            if (++attempts > 1000 * count) throw InputError("jump set '" + name_ + "' does not meet the box");
            Point z = p0 + rng.uniform(-half, half) * tangents[0] + rng.uniform(-half, half) * tangents[1];
            if (box.contains(z)) out.push_back(z);
        }
        return out;
    }

    // --- VectorField ------------------------------------------------------------

    struct VectorField::Impl
    {
        std::string name;
        Kind kind = Kind::AnalyticSmooth;
        Domain support;
        Extension extension = Extension::Clamp;
        double supBound = 0.0;
        bool drift = false;
        SmoothMap minus;
        SmoothMap plus;
        std::optional<JumpSet> jump;
        std::optional<GridSamples> grid;
        double fdStep = 0.0;

        const SmoothMap& map(Side s) const { return (jump && s == Side::Plus) ? plus : minus; }
    };

    namespace
    {
        void requireMap(const SmoothMap& m, const std::string& name)
        {
            if (!m.value) throw InputError("field '" + name + "': missing value function");
        }
    } // namespace

    VectorField VectorField::analytic(std::string name, Domain support, SmoothMap map, double supBound, bool driftFlag,
                                      Extension extension)
    {
        requireMap(map, name);
        if (!(supBound >= 0.0)) throw InputError("field '" + name + "': sup bound must be nonnegative");
        auto impl = std::make_shared<Impl>(Impl{std::move(name), Kind::AnalyticSmooth, std::move(support), extension,
                                                supBound, driftFlag, std::move(map), {}, std::nullopt, std::nullopt, 0.0});
        impl->fdStep = 1e-5 * impl->support.diameter();
        return VectorField(std::move(impl));
    }

    VectorField VectorField::piecewise(std::string name, Domain support, JumpSet jump, SmoothMap minus, SmoothMap plus,
                                       double supBound, bool driftFlag)
    {
        requireMap(minus, name);
        requireMap(plus, name);
        if (jump.dim() != support.dim()) throw InputError("field '" + name + "': jump set dimension mismatch");
        if (!(supBound >= 0.0)) throw InputError("field '" + name + "': sup bound must be nonnegative");
        auto impl = std::make_shared<Impl>(Impl{std::move(name), Kind::PiecewiseSmooth, std::move(support),
                                                Extension::Clamp, supBound, driftFlag, std::move(minus), std::move(plus),
                                                std::move(jump), std::nullopt, 0.0});
        impl->fdStep = 1e-5 * impl->support.diameter();
        return VectorField(std::move(impl));
    }

    VectorField VectorField::gridSampled(std::string name, Domain support, GridSamples samples)
    {
        const int d = support.dim();
        if (static_cast<int>(samples.counts.size()) != d)
            throw InputError("field '" + name + "': node counts do not match the dimension");
        std::size_t total = 1;
        for (int c : samples.counts)
        {
            if (c < 2) throw InputError("field '" + name + "': need at least two nodes per axis");
            total *= static_cast<std::size_t>(c);
        }
        if (samples.values.size() != total * static_cast<std::size_t>(d))
            throw InputError("field '" + name + "': expected " + std::to_string(total * d) + " values, got " +
                             std::to_string(samples.values.size()));

        double sup = 0.0;
        for (std::size_t k = 0; k < total; ++k)
        {
            double s = 0.0;
            for (int c = 0; c < d; ++c) s += samples.values[k * d + c] * samples.values[k * d + c];
            sup = std::max(sup, std::sqrt(s));
        }

        auto data = std::make_shared<const GridSamples>(samples);
        const Point lower = support.lower();
        const Point extent = support.extent();
        SmoothMap interp;
        interp.value = [data, lower, extent, d](const Point& x) {
            int base[3] = {0, 0, 0};
            double frac[3] = {0, 0, 0};
            for (int i = 0; i < d; ++i)
            {
                const int n = data->counts[i];
                double u = (x[i] - lower[i]) / extent[i] * (n - 1);
                u = std::clamp(u, 0.0, static_cast<double>(n - 1));
                const int i0 = std::min(static_cast<int>(std::floor(u)), n - 2);
                base[i] = i0;
                frac[i] = u - i0;
            }
            Point out = Point::Zero(d);
            for (int corner = 0; corner < (1 << d); ++corner)
            {
                double w = 1.0;
                std::size_t flat = 0;
                for (int i = 0; i < d; ++i)
                {
                    const int bit = (corner >> i) & 1;
                    w *= bit ? frac[i] : 1.0 - frac[i];
                    flat = flat * static_cast<std::size_t>(data->counts[i]) + static_cast<std::size_t>(base[i] + bit);
                }
                if (w == 0.0) continue;
                for (int c = 0; c < d; ++c) out[c] += w * data->values[flat * d + c];
            }
            return out;
        };
        auto impl = std::make_shared<Impl>(Impl{std::move(name), Kind::GridSampled, std::move(support), Extension::Clamp,
                                                sup, false, std::move(interp), {}, std::nullopt, std::move(samples), 0.0});
        impl->fdStep = 1e-5 * impl->support.diameter();
        return VectorField(std::move(impl));
    }

    VectorField::Kind VectorField::kind() const { return impl_->kind; }
    const std::string& VectorField::name() const { return impl_->name; }
    int VectorField::dim() const { return impl_->support.dim(); }
    const Domain& VectorField::support() const { return impl_->support; }
    double VectorField::supBound() const { return impl_->supBound; }
    bool VectorField::driftFlag() const { return impl_->drift; }
    const JumpSet* VectorField::jumpSet() const { return impl_->jump ? &*impl_->jump : nullptr; }
    double VectorField::fdStep() const { return impl_->fdStep; }

    Point VectorField::extend(const Point& x) const
    {
        return impl_->extension == Extension::Clamp ? impl_->support.clamp(x) : x;
    }

    Side VectorField::side(const Point& x) const
    {
        if (!impl_->jump) return Side::Minus;
        return sideOf(impl_->jump->level(extend(x)));
    }

    FieldValue VectorField::evaluate(const Point& x) const
    {
        if (x.size() != dim()) throw InputError("field '" + impl_->name + "': point has the wrong dimension");
        if (!x.allFinite()) throw InputError("field '" + impl_->name + "': non-finite evaluation point");
        const Point xe = extend(x);
        if (!impl_->jump) return {impl_->minus.value(xe), false};
        const double g = impl_->jump->level(xe);
        const Side s = sideOf(g);
        return {impl_->map(s).value(xe), g == 0.0};
    }

    Point VectorField::sideValue(Side s, const Point& x) const { return impl_->map(s).value(extend(x)); }

    Jacobian VectorField::sideJacobian(Side s, const Point& x) const
    {
        const SmoothMap& m = impl_->map(s);
        if (m.jacobian)
        {
            const Point xe = extend(x);
            Jacobian jac = m.jacobian(xe);
            if (impl_->extension == Extension::Clamp)
            {
                // Clamped coordinates do not vary, so their columns vanish.
                for (Eigen::Index j = 0; j < x.size(); ++j)
                {
                    if (x[j] < impl_->support.lower()[j] || x[j] > impl_->support.upper()[j]) jac.col(j).setZero();
                }
            }
            return jac;
        }
        return finiteDifferenceJacobian([this, s](const Point& z) { return sideValue(s, z); }, x, impl_->fdStep);
    }

    Jacobian VectorField::jacobian(const Point& x) const
    {
        if (x.size() != dim() || !x.allFinite()) throw InputError("field '" + impl_->name + "': invalid point");
        if (impl_->jump)
        {
            const Point xe = extend(x);
            const double g = impl_->jump->level(xe);
            const bool fd = !impl_->map(sideOf(g)).jacobian;
            if (g == 0.0 || (fd && impl_->jump->distance(xe) < impl_->fdStep))
                throw SingularPointError("field '" + impl_->name + "': derivative density requested on jump set '" +
                                         impl_->jump->name() + "'");
        }
        return sideJacobian(side(x), x);
    }

    VectorField VectorField::reversed() const
    {
        auto negate = [](const SmoothMap& m) {
            SmoothMap out;
            out.value = [v = m.value](const Point& x) -> Point { return -v(x); };
            if (m.jacobian) out.jacobian = [j = m.jacobian](const Point& x) -> Jacobian { return -j(x); };
            return out;
        };
        auto impl = std::make_shared<Impl>(*impl_);
        impl->name = impl_->name + "_reversed";
        impl->minus = negate(impl_->minus);
        if (impl_->jump) impl->plus = negate(impl_->plus);
        impl->drift = false;
        return VectorField(std::move(impl));
    }

    double gradNormDensity(const VectorField& f, const Point& x) { return f.jacobian(x).norm(); }

    double densityNoThrow(const VectorField& f, const Point& x) { return f.sideJacobian(f.side(x), x).norm(); }
} // namespace flowlab
