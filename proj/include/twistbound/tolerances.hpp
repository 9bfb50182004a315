#pragma once

namespace twistbound::tol {

// Root finding on monotone branches: relative or absolute, whichever is looser.
inline constexpr double kRootRel = 1e-12;
inline constexpr double kRootAbs = 1e-14;

// Circle/edge arc classification; nearly tangent intersections are merged.
inline constexpr double kAngle = 1e-10;

// Slack on the slice rotation laws (absolute, radians).
inline constexpr double kSliceLaw = 1e-6;

// Adaptive quadrature, relative.
inline constexpr double kQuadRel = 1e-8;

// Epsilon optimization (golden section width).
inline constexpr double kEpsilon = 1e-4;

// Eigensolver relative residual: ||A v - lambda v|| / (|lambda| ||v||).
inline constexpr double kEigResidual = 1e-8;

// Accepted relative overshoot of the extrapolated moment over the bound.
inline constexpr double kVerify = 0.05;

}  // namespace twistbound::tol
