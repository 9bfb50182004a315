#pragma once

#include <vector>

#include "twistbound/cross_section.hpp"
#include "twistbound/twist_profile.hpp"
#include "twistbound/types.hpp"

namespace twistbound {

/// One maximal axial interval (a, b) on which the transversal point lies
/// inside the tube. Endpoints clipped by the truncation window are flagged;
/// a clipped endpoint is not a true boundary crossing.
struct SliceInterval {
    double a = 0.0;
    double b = 0.0;
    bool clipped_lo = false;
    bool clipped_hi = false;

    bool partial() const { return clipped_lo || clipped_hi; }
    double length() const { return b - a; }
};

/// The slice set of a transversal point: all maximal intervals within the
/// window, ordered by position.
struct SliceIntervals {
    Vec2d y = Vec2d::Zero();
    Interval window;
    std::vector<SliceInterval> intervals;
};

/// Computes the slice set of y = (y2, y3). Membership at x1 means the polar
/// angle of y advanced by theta(x1) falls in the admissible angle set of the
/// cross-section at radius |y|. Interval endpoints are located by monotone
/// root solving on branches of theta. Throws DomainError for y at the origin.
SliceIntervals slice_intervals(const TwistProfile& profile, const CrossSection& cs,
                               const Vec2d& y, Interval window);

struct SliceLawEntry {
    int index;     // interval index (rotation checks) or left interval index (gaps)
    double delta;  // |theta(b)-theta(a)| or |theta(a_next)-theta(b)|
    bool ok;
};

/// Rotation-law report: per complete interval lying in a monotone region,
/// the in-interval rotation must not exceed pi; per gap between true
/// crossings, the rotation must be at least pi. Violations are reported,
/// never asserted.
struct SliceLawReport {
    std::vector<SliceLawEntry> rotations;
    std::vector<SliceLawEntry> gaps;

    bool all_ok() const {
        for (const auto& e : rotations)
            if (!e.ok) return false;
        for (const auto& e : gaps)
            if (!e.ok) return false;
        return true;
    }
};

SliceLawReport check_slice_laws(const SliceIntervals& si, const TwistProfile& profile);

}  // namespace twistbound
