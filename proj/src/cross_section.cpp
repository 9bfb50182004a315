#include "twistbound/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twistbound/errors.hpp"
#include "twistbound/tolerances.hpp"

namespace twistbound {

namespace {

double cross2(const Vec2d& a, const Vec2d& b) { return a.x() * b.y() - a.y() * b.x(); }

double shoelace(const std::vector<Vec2d>& v) {
    double twice = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2d& p = v[i];
        const Vec2d& q = v[(i + 1) % v.size()];
        twice += cross2(p, q);
    }
    return 0.5 * twice;
}

double point_segment_distance(const Vec2d& p, const Vec2d& a, const Vec2d& b) {
    const Vec2d d = b - a;
    const double len2 = d.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
    return (p - (a + t * d)).norm();
}

int orientation_sign(const Vec2d& a, const Vec2d& b, const Vec2d& c, double eps) {
    const double v = cross2(b - a, c - a);
    if (v > eps) return 1;
    if (v < -eps) return -1;
    return 0;
}

bool segments_intersect(const Vec2d& p1, const Vec2d& p2, const Vec2d& q1, const Vec2d& q2,
                        double eps) {
    const int o1 = orientation_sign(p1, p2, q1, eps);
    const int o2 = orientation_sign(p1, p2, q2, eps);
    const int o3 = orientation_sign(q1, q2, p1, eps);
    const int o4 = orientation_sign(q1, q2, p2, eps);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;

    auto on_segment = [&](const Vec2d& a, const Vec2d& b, const Vec2d& p) {
        if (orientation_sign(a, b, p, eps) != 0) return false;
        return p.x() >= std::min(a.x(), b.x()) - eps && p.x() <= std::max(a.x(), b.x()) + eps &&
               p.y() >= std::min(a.y(), b.y()) - eps && p.y() <= std::max(a.y(), b.y()) + eps;
    };
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace

bool AngleWindow::contains(double alpha) const {
    for (const Interval& w : intervals_)
        if (alpha > w.lo && alpha < w.hi) return true;
    return false;
}

double AngleWindow::total_width() const {
    double total = 0.0;
    for (const Interval& w : intervals_) total += w.length();
    return total;
}

CrossSection CrossSection::polygon(std::vector<Vec2d> vertices) {
    if (vertices.size() < 3) throw ValidationError("cross-section: need at least 3 vertices");

    double scale = 0.0;
    for (const Vec2d& v : vertices) {
        if (!v.allFinite()) throw ValidationError("cross-section: vertex must be finite");
        if (!(v.x() > 0.0))
            throw ValidationError("cross-section: every vertex must satisfy x2 > 0");
        scale = std::max({scale, std::abs(v.x()), std::abs(v.y())});
    }
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Vec2d& p = vertices[i];
        const Vec2d& q = vertices[(i + 1) % vertices.size()];
        if ((p - q).norm() <= 1e-12 * scale)
            throw ValidationError("cross-section: repeated consecutive vertices");
    }

    double area = shoelace(vertices);
    if (area < 0.0) {
        std::reverse(vertices.begin(), vertices.end());
        area = -area;
    }
    if (!(area > 1e-12 * scale * scale)) throw ValidationError("cross-section: zero area");

    // Simplicity: no two non-adjacent edges may intersect.
    const std::size_t n = vertices.size();
    const double eps = 1e-12 * scale * scale;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                                   vertices[(j + 1) % n], eps))
                throw ValidationError("cross-section: polygon is self-intersecting");
        }
    }

    CrossSection cs;
    cs.vertices_ = std::move(vertices);
    cs.area_ = area;
    cs.scale_ = scale;
    cs.r_max_ = 0.0;
    cs.r_min_ = std::numeric_limits<double>::infinity();
    const Vec2d origin = Vec2d::Zero();
    for (std::size_t i = 0; i < cs.vertices_.size(); ++i) {
        cs.r_max_ = std::max(cs.r_max_, cs.vertices_[i].norm());
        cs.r_min_ = std::min(cs.r_min_, point_segment_distance(origin, cs.vertices_[i],
                                                               cs.vertices_[(i + 1) % n]));
    }
    return cs;
}

CrossSection CrossSection::rectangle(double x_lo, double x_hi, double y_lo, double y_hi) {
    if (!(x_lo < x_hi && y_lo < y_hi))
        throw ValidationError("cross-section rectangle: degenerate extents");
    return polygon({Vec2d(x_lo, y_lo), Vec2d(x_hi, y_lo), Vec2d(x_hi, y_hi), Vec2d(x_lo, y_hi)});
}

bool CrossSection::contains(const Vec2d& p) const {
    const double eps = 1e-12 * std::max(scale_, 1.0);
    const std::size_t n = vertices_.size();
    // Boundary points are outside.
    for (std::size_t i = 0; i < n; ++i)
        if (point_segment_distance(p, vertices_[i], vertices_[(i + 1) % n]) <= eps) return false;

    // Crossing number with half-open edges.
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2d& vi = vertices_[i];
        const Vec2d& vj = vertices_[j];
        if ((vi.y() > p.y()) != (vj.y() > p.y())) {
            const double x_cross = vj.x() + (p.y() - vj.y()) / (vi.y() - vj.y()) * (vi.x() - vj.x());
            if (p.x() < x_cross) inside = !inside;
        }
    }
    return inside;
}

AngleWindow CrossSection::admissible_angles(double r) const {
    if (!(r > 0.0)) throw ValidationError("admissible_angles: r must be > 0");
    if (r <= r_min_ || r >= r_max_) return {};

    // Critical angles: circle/edge intersections. Between consecutive
    // critical angles membership along the circle is constant.
    std::vector<double> critical;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2d& p = vertices_[i];
        const Vec2d d = vertices_[(i + 1) % n] - p;
        const double a = d.squaredNorm();
        const double b = 2.0 * p.dot(d);
        const double c = p.squaredNorm() - r * r;
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0 || a == 0.0) continue;
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
        for (double t : {q / a, c == 0.0 ? 0.0 : c / q}) {
            if (t < -1e-12 || t > 1.0 + 1e-12) continue;
            const Vec2d x = p + std::clamp(t, 0.0, 1.0) * d;
            critical.push_back(std::atan2(x.y(), x.x()));
        }
    }
    // No edge crossings: membership is constant along the circle, and a
    // circle cannot lie entirely inside a half-plane polygon, so it is empty.
    if (critical.empty()) return {};

    std::sort(critical.begin(), critical.end());
    critical.erase(std::unique(critical.begin(), critical.end(),
                               [](double a, double b) { return b - a <= tol::kAngle; }),
                   critical.end());
    // The half-plane condition keeps every crossing in (-pi/2, pi/2); bracket
    // the sweep by the excluded directions.
    critical.insert(critical.begin(), -0.5 * std::numbers::pi);
    critical.push_back(0.5 * std::numbers::pi);

    std::vector<Interval> windows;
    for (std::size_t i = 0; i + 1 < critical.size(); ++i) {
        const double lo = critical[i];
        const double hi = critical[i + 1];
        if (hi - lo <= 2.0 * tol::kAngle) continue;
        const double mid = 0.5 * (lo + hi);
        if (!contains(Vec2d(r * std::cos(mid), r * std::sin(mid)))) continue;
        if (!windows.empty() && lo - windows.back().hi <= tol::kAngle)
            windows.back().hi = hi;  // merge across a tangency
        else
            windows.push_back({lo, hi});
    }
    return AngleWindow(std::move(windows));
}

}  // namespace twistbound
