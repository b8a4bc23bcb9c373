#pragma once

#include "flowlab/types.hpp"

namespace flowlab
{
    /// Axis-aligned box Ω in dimension 1, 2 or 3.
    class Domain
    {
    public:
        Domain(Point lower, Point upper);

        static Domain cube(int dim, double lo, double hi);

        int dim() const { return static_cast<int>(lower_.size()); }
        const Point& lower() const { return lower_; }
        const Point& upper() const { return upper_; }
        Point extent() const { return upper_ - lower_; }
        Point center() const { return 0.5 * (lower_ + upper_); }
        double measure() const;
        double diameter() const { return extent().norm(); }

        bool contains(const Point& x, double tol = 0.0) const;

        /// Nearest point of the box; used for the constant extension along outward rays.
        Point clamp(const Point& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

        /// Box grown by `margin` on every side.
        Domain inflated(double margin) const;

    private:
        Point lower_;
        Point upper_;
    };
} // namespace flowlab
