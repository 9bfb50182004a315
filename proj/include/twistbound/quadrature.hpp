#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "twistbound/errors.hpp"
#include "twistbound/tolerances.hpp"

namespace twistbound {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (positive half; symmetric).
// Odd indices of kGk15Nodes are the embedded 7-point Gauss nodes.
inline constexpr std::array<double, 8> kGk15Nodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kGk15Weights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGauss7Weights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEstimate {
    double kronrod;
    double gauss;
};

template <class F>
PanelEstimate gk15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double k = kGk15Weights[7] * f(c);
    double g = kGauss7Weights[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kGk15Nodes[i];
        const double sum = f(c - dx) + f(c + dx);
        k += kGk15Weights[i] * sum;
        if (i % 2 == 1) g += kGauss7Weights[i / 2] * sum;
    }
    return {k * half, g * half};
}

template <class F>
void adapt(F&& f, double a, double b, double tol_abs, int depth, QuadratureResult& out) {
    const auto est = gk15_panel(f, a, b);
    const double err = std::abs(est.kronrod - est.gauss);
    out.evaluations += 15;
    if (err <= tol_abs || depth >= 48) {
        if (depth >= 48 && err > 64.0 * tol_abs)
            throw NumericalError("integrate_adaptive: panel refinement exhausted");
        out.value += est.kronrod;
        out.error_estimate += err;
        return;
    }
    const double c = 0.5 * (a + b);
    adapt(f, a, c, 0.5 * tol_abs, depth + 1, out);
    adapt(f, c, b, 0.5 * tol_abs, depth + 1, out);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration over [breakpoints.front(), breakpoints.back()]
/// with every interior breakpoint forced to be a panel boundary. Breakpoints must
/// be sorted; they are where integrand discontinuities belong.
///
/// The tolerance is relative to a first-pass whole-interval estimate (with an
/// absolute floor so that identically-zero integrands terminate immediately).
/// Panels recurse depth-first and sums accumulate left to right, so the result
/// is deterministic.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints,
                                    double rel_tol = tol::kQuadRel, double abs_floor = 1e-300) {
    if (breakpoints.size() < 2) throw ValidationError("integrate_adaptive: need >= 2 breakpoints");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] >= breakpoints[i - 1]))
            throw ValidationError("integrate_adaptive: breakpoints must be sorted");

    // First pass: coarse magnitude estimate per panel to scale the tolerance.
    double magnitude = 0.0;
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (breakpoints[i] == breakpoints[i - 1]) continue;
        const auto est = detail::gk15_panel(f, breakpoints[i - 1], breakpoints[i]);
        magnitude += std::abs(est.kronrod);
    }
    const double tol_abs = std::max(rel_tol * magnitude, abs_floor);

    QuadratureResult out;
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (breakpoints[i] == breakpoints[i - 1]) continue;
        const double span = breakpoints[i] - breakpoints[i - 1];
        const double total = breakpoints.back() - breakpoints.front();
        detail::adapt(f, breakpoints[i - 1], breakpoints[i], tol_abs * span / total, 0, out);
    }
    return out;
}

template <class F>
QuadratureResult integrate_adaptive(F&& f, std::initializer_list<double> breakpoints,
                                    double rel_tol = tol::kQuadRel, double abs_floor = 1e-300) {
    std::vector<double> pts(breakpoints);
    return integrate_adaptive(std::forward<F>(f), std::span<const double>(pts), rel_tol, abs_floor);
}

}  // namespace twistbound
