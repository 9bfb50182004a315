#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "twistbound/errors.hpp"
#include "twistbound/tolerances.hpp"

namespace twistbound {

struct RootTol {
    double rel = tol::kRootRel;
    double abs = tol::kRootAbs;

    double width_at(double x) const { return std::max(rel * std::abs(x), abs); }
};

/// Solves g(x) = 0 for g monotone on [lo, hi] with a sign change over the
/// bracket. Bisection with a guarded secant step: the secant proposal is taken
/// only when it falls well inside the current bracket, otherwise we bisect.
/// The bracket never widens, so convergence is unconditional.
template <class F>
double solve_bracketed(F&& g, double lo, double hi, RootTol tol = {}) {
    double flo = g(lo);
    double fhi = g(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi))
        throw DomainError("solve_bracketed: no sign change over bracket");

    double a = lo, b = hi, fa = flo, fb = fhi;
    for (int iter = 0; iter < 200; ++iter) {
        const double width = b - a;
        if (width <= tol.width_at(0.5 * (a + b))) break;

        double x;
        const double denom = fb - fa;
        if (denom != 0.0) {
            x = a - fa * width / denom;  // secant through the bracket ends
            const double guard = 0.01 * width;
            if (!(x > a + guard && x < b - guard)) x = 0.5 * (a + b);
        } else {
            x = 0.5 * (a + b);
        }

        const double fx = g(x);
        if (fx == 0.0) return x;
        if (std::signbit(fx) == std::signbit(fa)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    // Return the endpoint with the smaller magnitude.
    return std::abs(fa) <= std::abs(fb) ? a : b;
}

/// Solves f(x) = target for f monotone on [lo, hi]; target must lie between
/// f(lo) and f(hi).
template <class F>
double solve_monotone(F&& f, double lo, double hi, double target, RootTol tol = {}) {
    return solve_bracketed([&](double x) { return f(x) - target; }, lo, hi, tol);
}

/// Expands a bracket geometrically away from `start` (direction +1 or -1)
/// until pred(x) holds, returning [previous, x]. `limit` caps the search.
template <class Pred>
std::pair<double, double> expand_until(Pred&& pred, double start, double initial_step,
                                       int direction, double limit) {
    double prev = start;
    double step = std::max(initial_step, 1e-8);
    for (int iter = 0; iter < 200; ++iter) {
        double next = prev + direction * step;
        if (direction > 0 ? next > limit : next < limit) {
            next = limit;
            if (pred(next)) return {prev, next};
            throw NumericalError("expand_until: predicate not reached before limit");
        }
        if (pred(next)) return {prev, next};
        prev = next;
        step *= 2.0;
    }
    throw NumericalError("expand_until: exhausted expansion budget");
}

}  // namespace twistbound
