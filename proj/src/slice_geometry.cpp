#include "twistbound/slice_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twistbound/errors.hpp"
#include "twistbound/root_finding.hpp"
#include "twistbound/tolerances.hpp"

namespace twistbound {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Monotone pieces of theta over the window, as breakpoint positions.
std::vector<double> monotone_breakpoints(const TwistProfile& profile, Interval window) {
    std::vector<double> pts{window.lo};
    switch (profile.family()) {
        case ProfileFamily::EvenPoly:
            if (window.lo < 0.0 && window.hi > 0.0) pts.push_back(0.0);
            break;
        case ProfileFamily::OddPoly:
            break;
        case ProfileFamily::Tabulated: {
            // Split where the sampled derivative changes sign.
            const int n = 512;
            double prev_x = window.lo;
            double prev_d = profile.dtheta(prev_x);
            for (int i = 1; i <= n; ++i) {
                const double x = window.lo + window.length() * i / n;
                const double d = profile.dtheta(x);
                if (prev_d != 0.0 && d != 0.0 && std::signbit(prev_d) != std::signbit(d)) {
                    // Refine the derivative zero.
                    pts.push_back(solve_bracketed(
                        [&](double t) { return profile.dtheta(t); }, prev_x, x));
                }
                prev_x = x;
                prev_d = d;
            }
            break;
        }
    }
    pts.push_back(window.hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

struct RawInterval {
    double a, b;
};

// Membership intervals of one monotone piece [p, q].
void collect_on_piece(const TwistProfile& profile, const AngleWindow& angles, double phi,
                      double p, double q, std::vector<RawInterval>& out) {
    const double theta_p = profile.theta(p);
    const double theta_q = profile.theta(q);
    const double lo_t = std::min(theta_p, theta_q);
    const double hi_t = std::max(theta_p, theta_q);

    if (hi_t - lo_t <= 1e-13 * (1.0 + std::abs(hi_t))) {
        // Degenerate piece: membership is constant on it.
        double alpha = std::remainder(phi + 0.5 * (theta_p + theta_q), kTwoPi);
        if (angles.contains(alpha)) out.push_back({p, q});
        return;
    }

    const bool increasing = theta_q > theta_p;
    auto theta_of = [&](double x) { return profile.theta(x); };

    for (const Interval& w : angles.intervals()) {
        // Solve theta(x) in (w.lo - phi + 2 pi k, w.hi - phi + 2 pi k).
        const long k_lo = static_cast<long>(std::floor((lo_t - (w.hi - phi)) / kTwoPi)) - 1;
        const long k_hi = static_cast<long>(std::ceil((hi_t - (w.lo - phi)) / kTwoPi)) + 1;
        for (long k = k_lo; k <= k_hi; ++k) {
            const double band_lo = w.lo - phi + kTwoPi * static_cast<double>(k);
            const double band_hi = w.hi - phi + kTwoPi * static_cast<double>(k);
            if (band_hi <= lo_t || band_lo >= hi_t) continue;

            double xa, xb;
            if (increasing) {
                xa = band_lo <= theta_p ? p : solve_monotone(theta_of, p, q, band_lo);
                xb = band_hi >= theta_q ? q : solve_monotone(theta_of, p, q, band_hi);
            } else {
                xa = band_hi >= theta_p ? p : solve_monotone(theta_of, p, q, band_hi);
                xb = band_lo <= theta_q ? q : solve_monotone(theta_of, p, q, band_lo);
            }
            if (xb - xa > 1e-11) out.push_back({xa, xb});
        }
    }
}

bool monotone_over(const TwistProfile& profile, double a, double b) {
    switch (profile.family()) {
        case ProfileFamily::EvenPoly:
            return a >= -1e-12 || b <= 1e-12;
        case ProfileFamily::OddPoly:
            return true;
        case ProfileFamily::Tabulated: {
            int sign = 0;
            for (int i = 0; i <= 32; ++i) {
                const double d = profile.dtheta(a + (b - a) * i / 32.0);
                if (std::abs(d) < 1e-12) continue;
                const int s = d > 0 ? 1 : -1;
                if (sign != 0 && s != sign) return false;
                sign = s;
            }
            return true;
        }
    }
    return false;
}

}  // namespace

SliceIntervals slice_intervals(const TwistProfile& profile, const CrossSection& cs,
                               const Vec2d& y, Interval window) {
    if (y.norm() == 0.0) throw DomainError("slice_intervals: y at the rotation axis");
    if (window.empty() || !std::isfinite(window.lo) || !std::isfinite(window.hi))
        throw ValidationError("slice_intervals: window must be finite and nonempty");

    SliceIntervals result;
    result.y = y;
    result.window = window;

    const double r = y.norm();
    const AngleWindow angles = cs.admissible_angles(r);
    if (angles.empty()) return result;

    const double phi = std::atan2(y.y(), y.x());
    const std::vector<double> pieces = monotone_breakpoints(profile, window);

    std::vector<RawInterval> raw;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
        collect_on_piece(profile, angles, phi, pieces[i], pieces[i + 1], raw);

    std::sort(raw.begin(), raw.end(), [](const RawInterval& u, const RawInterval& v) {
        return u.a < v.a;
    });

    // Merge intervals that abut across a piece boundary.
    const double merge_tol = 1e-9 * (1.0 + std::max(std::abs(window.lo), std::abs(window.hi)));
    std::vector<RawInterval> merged;
    for (const RawInterval& iv : raw) {
        if (!merged.empty() && iv.a - merged.back().b <= merge_tol)
            merged.back().b = std::max(merged.back().b, iv.b);
        else
            merged.push_back(iv);
    }

    for (const RawInterval& iv : merged) {
        SliceInterval s;
        s.a = iv.a;
        s.b = iv.b;
        s.clipped_lo = iv.a <= window.lo + merge_tol;
        s.clipped_hi = iv.b >= window.hi - merge_tol;
        result.intervals.push_back(s);
    }
    return result;
}

SliceLawReport check_slice_laws(const SliceIntervals& si, const TwistProfile& profile) {
    SliceLawReport report;
    const auto& ivs = si.intervals;

    for (std::size_t i = 0; i < ivs.size(); ++i) {
        if (ivs[i].partial()) continue;
        if (!monotone_over(profile, ivs[i].a, ivs[i].b)) continue;
        const double delta = std::abs(profile.theta(ivs[i].b) - profile.theta(ivs[i].a));
        report.rotations.push_back(
            {static_cast<int>(i), delta, delta <= std::numbers::pi + tol::kSliceLaw});
    }
    for (std::size_t i = 0; i + 1 < ivs.size(); ++i) {
        // A gap check needs true crossings on both sides and a monotone
        // rotation across the gap.
        if (ivs[i].clipped_hi || ivs[i + 1].clipped_lo) continue;
        if (!monotone_over(profile, ivs[i].b, ivs[i + 1].a)) continue;
        const double delta = std::abs(profile.theta(ivs[i + 1].a) - profile.theta(ivs[i].b));
        report.gaps.push_back(
            {static_cast<int>(i), delta, delta >= std::numbers::pi - tol::kSliceLaw});
    }
    return report;
}

}  // namespace twistbound
