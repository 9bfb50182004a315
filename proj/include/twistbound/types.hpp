#pragma once

#include <Eigen/Core>

namespace twistbound {

template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <class Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec2d = Vec2<double>;
using Vec3d = Vec3<double>;

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    double midpoint() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool empty() const { return hi <= lo; }
};

}  // namespace twistbound
