#include "flowlab/domain.hpp"

#include "flowlab/errors.hpp"

#include <string>

namespace flowlab
{
    Domain::Domain(Point lower, Point upper) : lower_(std::move(lower)), upper_(std::move(upper))
    {
        if (lower_.size() < 1 || lower_.size() > 3 || lower_.size() != upper_.size())
            throw InputError("domain: dimension must be 1, 2 or 3 with matching bounds");
        if (!lower_.allFinite() || !upper_.allFinite())
            throw InputError("domain: bounds must be finite");
        for (Eigen::Index i = 0; i < lower_.size(); ++i)
        {
            if (!(lower_[i] < upper_[i]))
                throw InputError("domain: lower < upper violated on axis " + std::to_string(i));
        }
    }

    Domain Domain::cube(int dim, double lo, double hi)
    {
        if (dim < 1 || dim > 3) throw InputError("domain: dimension must be 1, 2 or 3");
        return Domain(Point::Constant(dim, lo), Point::Constant(dim, hi));
    }

    double Domain::measure() const { return extent().prod(); }

    bool Domain::contains(const Point& x, double tol) const
    {
        if (x.size() != lower_.size()) return false;
        return ((x.array() >= lower_.array() - tol) && (x.array() <= upper_.array() + tol)).all();
    }

    Domain Domain::inflated(double margin) const
    {
        return Domain(lower_.array() - margin, upper_.array() + margin);
    }
} // namespace flowlab
