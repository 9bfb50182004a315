#pragma once

#include <optional>
#include <vector>

#include "twistbound/types.hpp"

namespace twistbound {

enum class ProfileFamily { EvenPoly, OddPoly, Tabulated };
enum class Branch { Plus, Minus };

struct ProfileEval {
    double theta;
    double dtheta;
};

/// Rotation-angle profile of a twisted tube: the angle theta(x1), its
/// derivative, and the monotone-branch inverses used by the moment bound.
///
/// Families:
///   EvenPoly   theta(x1) = sum_k A_k x1^(2k),      A_k >= 0 for k >= 1, A_m > 0
///   OddPoly    theta(x1) = theta0 + sum_k A_k x1^(2k+1), all A_k >= 0, A_m > 0
///   Tabulated  cubic-Hermite interpolant of (x, theta, dtheta) samples
///
/// Immutable after construction; all queries are pure.
class TwistProfile {
public:
    static TwistProfile even_poly(std::vector<double> coefficients,
                                  std::optional<double> s0 = std::nullopt);
    static TwistProfile odd_poly(std::vector<double> coefficients, double theta0 = 0.0,
                                 std::optional<double> s0 = std::nullopt);
    static TwistProfile tabulated(std::vector<double> x, std::vector<double> theta,
                                  std::vector<double> dtheta,
                                  std::optional<double> s0 = std::nullopt);

    ProfileFamily family() const { return family_; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    double theta0() const { return theta0_; }
    std::optional<double> s0() const { return s0_; }

    /// Sampled window for Tabulated profiles; unbounded for the polynomial families.
    Interval domain() const { return domain_; }

    /// theta(x1) and dtheta(x1). Tabulated profiles reject queries outside
    /// their sampled window.
    ProfileEval eval(double x1) const;
    double theta(double x1) const { return eval(x1).theta; }
    double dtheta(double x1) const { return eval(x1).dtheta; }

    /// Monotone-branch inverse: the unique z >= 0 (Plus) or z <= 0 (Minus)
    /// with theta(z) = alpha. Throws DomainError when alpha is outside the
    /// branch range, ValidationError for a non-monotone Tabulated branch.
    double branch_inverse(Branch branch, double alpha) const;

    /// Inverse of theta restricted to [anchor, +inf) (Plus) or (-inf, anchor]
    /// (Minus), for profiles whose admissibility only holds beyond |x1| >= s0.
    /// anchor must be >= 0 for Plus and <= 0 for Minus.
    double branch_inverse_from(Branch branch, double alpha, double anchor) const;

private:
    TwistProfile() = default;

    double poly_theta(double x) const;
    double poly_dtheta(double x) const;
    ProfileEval tabulated_eval(double x) const;
    void require_monotone_branch(Branch branch, double anchor) const;

    ProfileFamily family_ = ProfileFamily::EvenPoly;
    std::vector<double> coeffs_;
    double theta0_ = 0.0;
    std::optional<double> s0_;
    Interval domain_{-std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()};

    // Tabulated samples.
    std::vector<double> tab_x_, tab_theta_, tab_dtheta_;
};

/// Finite-window evidence for the admissibility conditions. The flags report
/// whether a condition set holds over the whole window; effective_s0 is the
/// smallest sampled s beyond which at least one set holds (infinity if none
/// ever does). Threshold exceedance of |dtheta| at the window ends is
/// evidence for the explosion condition, not a proof.
struct ConditionReport {
    bool explosion_ok = false;
    bool even_conditions_ok = false;
    bool odd_conditions_ok = false;
    double effective_s0 = std::numeric_limits<double>::infinity();
};

/// Samples dtheta on a deterministic grid over `window` (symmetric about 0)
/// and classifies the profile against both condition families.
ConditionReport validate_conditions(const TwistProfile& profile, Interval window,
                                    double dtheta_threshold);

}  // namespace twistbound
