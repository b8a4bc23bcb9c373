#pragma once

#include <Eigen/Core>

namespace flowlab
{
    // Points and velocities live in dimension 1, 2 or 3; the fixed maximum
    // size keeps them on the stack.
    template <typename Scalar>
    using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

    template <typename Scalar>
    using JacobianT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

    using Point = PointT<double>;
    using Jacobian = JacobianT<double>;

    /// Side of a jump hypersurface. Points exactly on it belong to Minus.
    enum class Side
    {
        Minus,
        Plus
    };

    inline Side opposite(Side s) { return s == Side::Minus ? Side::Plus : Side::Minus; }

    inline Side sideOf(double level) { return level > 0.0 ? Side::Plus : Side::Minus; }

    template <typename Derived>
    bool allFinite(const Eigen::MatrixBase<Derived>& x)
    {
        return x.allFinite();
    }

    inline Point makePoint(std::initializer_list<double> values)
    {
        Point p(static_cast<Eigen::Index>(values.size()));
        Eigen::Index i = 0;
        for (double v : values) p[i++] = v;
        return p;
    }
} // namespace flowlab
