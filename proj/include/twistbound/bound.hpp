#pragma once

#include <optional>
#include <string>

#include "twistbound/cross_section.hpp"
#include "twistbound/twist_profile.hpp"
#include "twistbound/types.hpp"

namespace twistbound {

/// Which effective potential enters the bound. Even pairs with profiles whose
/// twisting velocity is increasing and sign-split across 0; Odd with profiles
/// whose velocity is nonnegative, increasing on R_+ and decreasing on R_-.
/// The localized variants gate the potential to |x1| beyond the profile's s0.
enum class PotentialVariant { Even, Odd, LocalizedEven, LocalizedOdd };

const char* to_string(PotentialVariant v);

/// Choice of the moment-inequality constant. The semiclassical value is only
/// proven for sigma >= 3/2; below that the caller must supply an explicit
/// multiple of it.
struct ConstantPolicy {
    enum class Kind { Semiclassical, Scaled };
    Kind kind = Kind::Semiclassical;
    double factor = 1.0;

    static ConstantPolicy semiclassical() { return {Kind::Semiclassical, 1.0}; }
    static ConstantPolicy scaled(double factor) { return {Kind::Scaled, factor}; }
};

struct BoundQuery {
    double sigma = 1.5;
    double lambda = 0.0;
    std::optional<double> epsilon;  // nullopt: optimize over (0,1)
    PotentialVariant variant = PotentialVariant::Even;
    ConstantPolicy policy = ConstantPolicy::semiclassical();
};

/// Throws ValidationError when the query violates a precondition (range
/// errors, semiclassical policy below sigma = 3/2).
void validate(const BoundQuery& q);

struct BoundResult {
    double rhs = 0.0;
    double epsilon_used = 0.0;
    Interval support_minus{0.0, 0.0};  // {eps f < Lambda} on the minus half-line
    Interval support_plus{0.0, 0.0};
    double integral_value = 0.0;  // integral of (eps f - Lambda)_-^(sigma+3/2)
    double l_sigma = 0.0;         // constant actually used
};

/// Semiclassical constant Gamma(sigma+1) / ((4 pi)^(d/2) Gamma(sigma+1+d/2)),
/// evaluated through log-Gamma. Requires sigma >= 0, d >= 1.
double semiclassical_constant(double sigma, int d);

/// The effective potential of a profile/variant pair: twisting velocity
/// squared, composed with the branch inverse shifted by pi, gated outside a
/// central plateau. Thresholds are resolved once at construction.
class EffectivePotential {
public:
    EffectivePotential(TwistProfile profile, PotentialVariant variant);

    double operator()(double x1) const;
    double plus_threshold() const { return plus_threshold_; }
    double minus_threshold() const { return minus_threshold_; }
    const TwistProfile& profile() const { return profile_; }
    PotentialVariant variant() const { return variant_; }

private:
    TwistProfile profile_;
    PotentialVariant variant_ = PotentialVariant::Even;
    double plus_threshold_ = 0.0;   // plateau edge on R_+
    double minus_threshold_ = 0.0;  // plateau edge on R_- (negative)
    double plus_anchor_ = 0.0;      // branch restriction for localized variants
    double minus_anchor_ = 0.0;
    double minus_shift_ = 0.0;      // -pi (even reading) or +pi (odd reading)
};

/// Effective potential value at a single point.
double effective_potential(const TwistProfile& profile, PotentialVariant variant, double x1);

/// Right-hand side of the moment inequality:
///   L_sigma / (1-eps)^(3/2) * |omega| * integral (eps f - Lambda)_-^(sigma+3/2).
/// The compact support of the integrand is located by bracket expansion from
/// the plateau edges; the plateau discontinuities are forced quadrature panel
/// boundaries. With q.epsilon empty the bound is minimized over eps first.
BoundResult berezin_rhs(const TwistProfile& profile, const CrossSection& cs,
                        const BoundQuery& q);

struct EpsilonOptimum {
    double epsilon_star;
    double rhs_star;
};

/// Minimizes berezin_rhs over eps: coarse grid {0.05,...,0.95} then golden
/// section refinement. Lambda = 0 returns (0.5, 0) by convention.
EpsilonOptimum optimize_epsilon(const TwistProfile& profile, const CrossSection& cs,
                                double sigma, double lambda, PotentialVariant variant,
                                ConstantPolicy policy);

struct AsymptoticResult {
    double value = 0.0;
    double integral_value = 0.0;
    double epsilon_used = 0.0;
    double k1 = 0.0;  // sup |inverse-shift displacement| on the plus side
    double k2 = 0.0;  // same on the minus side
};

/// Large-Lambda surrogate: same pipeline with f replaced by dtheta^2, plus
/// the displacement diagnostics K1, K2 sampled over the support.
AsymptoticResult asymptotic_rhs(const TwistProfile& profile, const CrossSection& cs,
                                const BoundQuery& q);

/// Classical bounded-domain estimate L_sigma * Lambda^(sigma+3/2) * |omega| * N
/// for the straight truncation of length N. The semiclassical constant is
/// only admitted for sigma >= 1; below that supply a scaled policy.
double classical_berezin(const CrossSection& cs, double tube_length, double sigma,
                         double lambda, ConstantPolicy policy = ConstantPolicy::semiclassical());

}  // namespace twistbound
