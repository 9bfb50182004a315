#pragma once

#include <vector>

#include "twistbound/types.hpp"

namespace twistbound {

/// Disjoint open angle intervals, each inside (-pi/2, pi/2), sorted ascending.
/// Realizes the set A(r) of polar angles at which a circle of radius r meets
/// the cross-section.
class AngleWindow {
public:
    AngleWindow() = default;
    explicit AngleWindow(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {}

    const std::vector<Interval>& intervals() const { return intervals_; }
    bool empty() const { return intervals_.empty(); }

    /// Strict membership of an angle in some interval.
    bool contains(double alpha) const;

    double total_width() const;

private:
    std::vector<Interval> intervals_;
};

/// Simple polygon in the open half-plane {first coordinate > 0}, stored
/// counter-clockwise. Immutable after construction; all queries are pure.
class CrossSection {
public:
    /// Validates and builds a cross-section. Throws ValidationError for fewer
    /// than 3 vertices, any vertex with first coordinate <= 0, self
    /// intersection, or vanishing area. Clockwise input is reversed.
    static CrossSection polygon(std::vector<Vec2d> vertices);

    /// Axis-aligned rectangle [x_lo, x_hi] x [y_lo, y_hi]; the common case in
    /// configs and tests.
    static CrossSection rectangle(double x_lo, double x_hi, double y_lo, double y_hi);

    const std::vector<Vec2d>& vertices() const { return vertices_; }
    double area() const { return area_; }
    double r_min() const { return r_min_; }
    double r_max() const { return r_max_; }

    /// Strict interior test; boundary points count as outside (Dirichlet
    /// convention, so grid masks under-approximate the domain).
    bool contains(const Vec2d& p) const;

    /// The angular set A(r) = { alpha : (r cos alpha, r sin alpha) inside }.
    /// Computed by intersecting the circle of radius r with each edge and
    /// classifying the arcs between critical angles. Empty when the circle
    /// misses the polygon. Requires r > 0.
    AngleWindow admissible_angles(double r) const;

private:
    CrossSection() = default;

    std::vector<Vec2d> vertices_;
    double area_ = 0.0;
    double r_min_ = 0.0;
    double r_max_ = 0.0;
    double scale_ = 1.0;  // max coordinate magnitude, for tolerance scaling
};

}  // namespace twistbound
