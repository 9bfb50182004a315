#include "twistbound/bound.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "twistbound/errors.hpp"
#include "twistbound/quadrature.hpp"
#include "twistbound/root_finding.hpp"
#include "twistbound/tolerances.hpp"

namespace twistbound {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool variant_is_even(PotentialVariant v) {
    return v == PotentialVariant::Even || v == PotentialVariant::LocalizedEven;
}

bool variant_is_localized(PotentialVariant v) {
    return v == PotentialVariant::LocalizedEven || v == PotentialVariant::LocalizedOdd;
}

// Per-family admissibility window used when the profile is tabulated.
Interval symmetric_domain(const TwistProfile& profile) {
    const Interval d = profile.domain();
    const double w = std::min(-d.lo, d.hi);
    return {-w, w};
}

void require_admissible(const TwistProfile& profile, PotentialVariant variant) {
    if (variant_is_localized(variant) && !profile.s0())
        throw ValidationError("effective potential: localized variant needs profile s0");

    const bool want_even = variant_is_even(variant);
    switch (profile.family()) {
        case ProfileFamily::EvenPoly:
            if (!want_even)
                throw ValidationError("effective potential: even-family profile with odd variant");
            return;
        case ProfileFamily::OddPoly:
            if (want_even)
                throw ValidationError("effective potential: odd-family profile with even variant");
            return;
        case ProfileFamily::Tabulated: {
            const ConditionReport report =
                validate_conditions(profile, symmetric_domain(profile), 1e-300);
            if (!variant_is_localized(variant)) {
                const bool ok = want_even ? report.even_conditions_ok : report.odd_conditions_ok;
                if (!ok)
                    throw ValidationError(
                        "effective potential: tabulated profile fails the variant's conditions");
            } else {
                const double s0 = *profile.s0();
                if (!(report.effective_s0 <= s0 * (1.0 + 1e-9) + 1e-12))
                    throw ValidationError(
                        "effective potential: conditions do not hold beyond the declared s0");
            }
            return;
        }
    }
}

}  // namespace

const char* to_string(PotentialVariant v) {
    switch (v) {
        case PotentialVariant::Even: return "even";
        case PotentialVariant::Odd: return "odd";
        case PotentialVariant::LocalizedEven: return "localized_even";
        case PotentialVariant::LocalizedOdd: return "localized_odd";
    }
    return "?";
}

void validate(const BoundQuery& q) {
    if (!(q.sigma >= 0.0) || !std::isfinite(q.sigma))
        throw ValidationError("bound query: sigma must be finite and >= 0");
    if (!(q.lambda >= 0.0) || !std::isfinite(q.lambda))
        throw ValidationError("bound query: lambda must be finite and >= 0");
    if (q.epsilon && !(*q.epsilon > 0.0 && *q.epsilon < 1.0))
        throw ValidationError("bound query: epsilon must lie in (0, 1)");
    switch (q.policy.kind) {
        case ConstantPolicy::Kind::Semiclassical:
            if (q.sigma < 1.5)
                throw ValidationError(
                    "bound query: the semiclassical constant is only valid for sigma >= 3/2; "
                    "supply a scaled constant policy below that");
            break;
        case ConstantPolicy::Kind::Scaled:
            if (!(q.policy.factor > 0.0) || !std::isfinite(q.policy.factor))
                throw ValidationError("bound query: scaled policy factor must be > 0");
            break;
    }
}

double semiclassical_constant(double sigma, int d) {
    if (!(sigma >= 0.0)) throw ValidationError("semiclassical_constant: sigma must be >= 0");
    if (d < 1) throw ValidationError("semiclassical_constant: dimension must be >= 1");
    const double half_d = 0.5 * static_cast<double>(d);
    return std::exp(std::lgamma(sigma + 1.0) - half_d * std::log(4.0 * kPi) -
                    std::lgamma(sigma + 1.0 + half_d));
}

EffectivePotential::EffectivePotential(TwistProfile profile, PotentialVariant variant)
    : profile_(std::move(profile)), variant_(variant) {
    require_admissible(profile_, variant_);

    const bool even = variant_is_even(variant_);
    minus_shift_ = even ? -kPi : kPi;

    if (!variant_is_localized(variant_)) {
        const double theta0 = profile_.theta0();
        plus_threshold_ = profile_.branch_inverse(Branch::Plus, theta0 + 2.0 * kPi);
        minus_threshold_ = profile_.branch_inverse(
            Branch::Minus, even ? theta0 + 2.0 * kPi : theta0 - 2.0 * kPi);
        plus_anchor_ = 0.0;
        minus_anchor_ = 0.0;
        return;
    }

    const double s0 = *profile_.s0();
    plus_anchor_ = s0;
    minus_anchor_ = -s0;
    const double theta_s0 = profile_.theta(s0);
    const double theta_ms0 = profile_.theta(-s0);
    plus_threshold_ = std::max(
        s0, profile_.branch_inverse_from(Branch::Plus, theta_s0 + 2.0 * kPi, s0));
    const double minus_target = even ? theta_ms0 + 2.0 * kPi : theta_ms0 - 2.0 * kPi;
    minus_threshold_ = std::min(
        -s0, profile_.branch_inverse_from(Branch::Minus, minus_target, -s0));
}

double EffectivePotential::operator()(double x1) const {
    if (x1 >= plus_threshold_) {
        const double target = profile_.theta(x1) - kPi;
        const double z = profile_.branch_inverse_from(Branch::Plus, target, plus_anchor_);
        const double d = profile_.dtheta(z);
        return d * d;
    }
    if (x1 <= minus_threshold_) {
        const double target = profile_.theta(x1) + minus_shift_;
        const double z = profile_.branch_inverse_from(Branch::Minus, target, minus_anchor_);
        const double d = profile_.dtheta(z);
        return d * d;
    }
    return 0.0;
}

double effective_potential(const TwistProfile& profile, PotentialVariant variant, double x1) {
    return EffectivePotential(profile, variant)(x1);
}

namespace {

// Upper end of the integrand support on one half-line: expands from the
// plateau edge until eps*V stays above 2*Lambda, then locates the last
// crossing of eps*V = Lambda inside the bracket. The integrand is clipped at
// zero anyway, so a conservative (larger) endpoint is harmless.
struct HalfSupport {
    double crossing;  // where eps*V first stays >= Lambda
    double far_end;   // where eps*V reached 2*Lambda (integration endpoint)
};

template <class V>
HalfSupport locate_support(V&& v, double threshold, int direction, double eps, double lambda,
                           double limit) {
    const double at_edge = eps * v(threshold);
    if (at_edge >= lambda) return {threshold, threshold};

    const double step = std::max(0.25, 0.05 * std::abs(threshold));
    auto above = [&](double x) { return eps * v(x) >= lambda; };
    const auto bracket = expand_until(above, threshold, step, direction, limit);
    double crossing = solve_bracketed(
        [&](double x) { return eps * v(x) - lambda; }, std::min(bracket.first, bracket.second),
        std::max(bracket.first, bracket.second));

    double far_end = crossing;
    if (lambda > 0.0) {
        auto comfortably_above = [&](double x) { return eps * v(x) >= 2.0 * lambda; };
        const auto far = expand_until(comfortably_above, crossing, step, direction, limit);
        far_end = far.second;
    }
    return {crossing, far_end};
}

struct IntegralPieces {
    double integral = 0.0;
    Interval support_minus{0.0, 0.0};
    Interval support_plus{0.0, 0.0};
};

template <class V>
IntegralPieces integrate_clipped(V&& v, double plus_threshold, double minus_threshold,
                                 double eps, double lambda, double power, Interval limits) {
    IntegralPieces out;
    if (lambda <= 0.0) return out;

    const auto plus = locate_support(v, plus_threshold, +1, eps, lambda, limits.hi);
    const auto minus = locate_support(v, minus_threshold, -1, eps, lambda, limits.lo);

    auto integrand = [&](double x) {
        const double deficit = lambda - eps * v(x);
        return deficit > 0.0 ? std::pow(deficit, power) : 0.0;
    };

    std::vector<double> pts{minus.far_end, minus.crossing, minus_threshold, 0.0,
                            plus_threshold, plus.crossing, plus.far_end};
    std::sort(pts.begin(), pts.end());
    out.integral = integrate_adaptive(integrand, std::span<const double>(pts)).value;
    out.support_minus = {minus.crossing, 0.0};
    out.support_plus = {0.0, plus.crossing};
    return out;
}

double applied_constant(double sigma, ConstantPolicy policy) {
    const double base = semiclassical_constant(sigma, 3);
    return policy.kind == ConstantPolicy::Kind::Scaled ? policy.factor * base : base;
}

Interval integration_limits(const TwistProfile& profile) {
    if (profile.family() == ProfileFamily::Tabulated) return profile.domain();
    return {-kInf, kInf};
}

BoundResult berezin_rhs_fixed(const TwistProfile& profile, const CrossSection& cs,
                              const BoundQuery& q, double eps) {
    const double l_sigma = applied_constant(q.sigma, q.policy);
    const EffectivePotential V(profile, q.variant);

    BoundResult result;
    result.epsilon_used = eps;
    result.l_sigma = l_sigma;
    if (q.lambda == 0.0) return result;

    const double power = q.sigma + 1.5;
    const auto pieces =
        integrate_clipped([&V](double x) { return V(x); }, V.plus_threshold(),
                          V.minus_threshold(), eps, q.lambda, power,
                          integration_limits(profile));

    result.integral_value = pieces.integral;
    result.support_minus = pieces.support_minus;
    result.support_plus = pieces.support_plus;
    result.rhs = l_sigma / std::pow(1.0 - eps, 1.5) * cs.area() * pieces.integral;
    return result;
}

}  // namespace

BoundResult berezin_rhs(const TwistProfile& profile, const CrossSection& cs,
                        const BoundQuery& q) {
    validate(q);
    if (q.epsilon) return berezin_rhs_fixed(profile, cs, q, *q.epsilon);
    const EpsilonOptimum opt =
        optimize_epsilon(profile, cs, q.sigma, q.lambda, q.variant, q.policy);
    return berezin_rhs_fixed(profile, cs, q, opt.epsilon_star);
}

EpsilonOptimum optimize_epsilon(const TwistProfile& profile, const CrossSection& cs,
                                double sigma, double lambda, PotentialVariant variant,
                                ConstantPolicy policy) {
    BoundQuery q{sigma, lambda, std::nullopt, variant, policy};
    validate(q);
    if (lambda == 0.0) return {0.5, 0.0};

    auto objective = [&](double eps) { return berezin_rhs_fixed(profile, cs, q, eps).rhs; };

    double best_eps = 0.5;
    double best_val = kInf;
    std::vector<double> grid;
    for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = objective(grid[i]);
        if (values[i] < best_val) {
            best_val = values[i];
            best_eps = grid[i];
        }
    }

    std::size_t best_i = static_cast<std::size_t>(
        std::find(grid.begin(), grid.end(), best_eps) - grid.begin());
    double lo = best_i == 0 ? 0.01 : grid[best_i - 1];
    double hi = best_i + 1 == grid.size() ? 0.99 : grid[best_i + 1];

    // Golden-section refinement on the bracketing grid cell.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (hi - lo > tol::kEpsilon) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    const double eps_star = f1 <= f2 ? x1 : x2;
    const double val_star = std::min(f1, f2);
    if (val_star <= best_val) return {eps_star, val_star};
    return {best_eps, best_val};
}

AsymptoticResult asymptotic_rhs(const TwistProfile& profile, const CrossSection& cs,
                                const BoundQuery& q) {
    validate(q);
    const EffectivePotential V(profile, q.variant);  // threshold bookkeeping + admissibility

    double eps;
    if (q.epsilon) {
        eps = *q.epsilon;
    } else {
        eps = optimize_epsilon(profile, cs, q.sigma, q.lambda, q.variant, q.policy).epsilon_star;
    }

    AsymptoticResult result;
    result.epsilon_used = eps;

    auto velocity_sq = [&](double x) {
        const double d = profile.dtheta(x);
        return d * d;
    };

    const double l_sigma = applied_constant(q.sigma, q.policy);
    Interval support_plus{0.0, 0.0};
    Interval support_minus{0.0, 0.0};
    if (q.lambda > 0.0 && eps * velocity_sq(0.0) < q.lambda) {
        // The surrogate potential has no plateau; 0 splits the half-lines.
        const auto pieces = integrate_clipped(velocity_sq, 0.0, 0.0, eps, q.lambda,
                                              q.sigma + 1.5, integration_limits(profile));
        result.integral_value = pieces.integral;
        support_plus = pieces.support_plus;
        support_minus = pieces.support_minus;
    }
    result.value = l_sigma / std::pow(1.0 - eps, 1.5) * cs.area() * result.integral_value;

    // Displacement diagnostics: how far the pi-shifted branch inverse sits
    // from the identity, sampled from the inverse-domain edge across the
    // support of the surrogate integrand.
    const bool even = variant_is_even(q.variant);
    const bool localized = variant_is_localized(q.variant);
    const Interval limits = integration_limits(profile);
    {
        const double anchor = localized ? *profile.s0() : 0.0;
        const double start =
            profile.branch_inverse_from(Branch::Plus, profile.theta(anchor) + kPi, anchor);
        const double end = std::min(std::max(support_plus.hi, start + 1.0), limits.hi);
        double k1 = 0.0;
        for (int i = 0; i <= 512; ++i) {
            const double x = start + (end - start) * i / 512.0;
            const double z =
                profile.branch_inverse_from(Branch::Plus, profile.theta(x) - kPi, anchor);
            k1 = std::max(k1, std::abs(z - x));
        }
        result.k1 = k1;
    }
    {
        const double anchor = localized ? -*profile.s0() : 0.0;
        const double shift = even ? kPi : -kPi;
        const double start =
            profile.branch_inverse_from(Branch::Minus, profile.theta(anchor) + shift, anchor);
        const double end = std::max(std::min(support_minus.lo, start - 1.0), limits.lo);
        double k2 = 0.0;
        for (int i = 0; i <= 512; ++i) {
            const double x = start + (end - start) * i / 512.0;
            const double z =
                profile.branch_inverse_from(Branch::Minus, profile.theta(x) - shift, anchor);
            k2 = std::max(k2, std::abs(z - x));
        }
        result.k2 = k2;
    }
    return result;
}

double classical_berezin(const CrossSection& cs, double tube_length, double sigma,
                         double lambda, ConstantPolicy policy) {
    if (!(tube_length > 0.0)) throw ValidationError("classical_berezin: tube length must be > 0");
    if (!(lambda >= 0.0)) throw ValidationError("classical_berezin: lambda must be >= 0");
    if (!(sigma >= 0.0)) throw ValidationError("classical_berezin: sigma must be >= 0");
    if (policy.kind == ConstantPolicy::Kind::Semiclassical && sigma < 1.0)
        throw ValidationError(
            "classical_berezin: the semiclassical constant requires sigma >= 1; "
            "supply a scaled constant policy below that");
    if (policy.kind == ConstantPolicy::Kind::Scaled && !(policy.factor > 0.0))
        throw ValidationError("classical_berezin: scaled policy factor must be > 0");

    const double l_sigma = applied_constant(sigma, policy);
    return l_sigma * std::pow(lambda, sigma + 1.5) * cs.area() * tube_length;
}

}  // namespace twistbound
