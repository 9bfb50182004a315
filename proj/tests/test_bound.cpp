#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "twistbound/bound.hpp"
#include "twistbound/errors.hpp"

using namespace twistbound;

namespace {

constexpr double kPi = std::numbers::pi;

TwistProfile parabola() { return TwistProfile::even_poly({0.0, 1.0}); }
TwistProfile cubic() { return TwistProfile::odd_poly({1.0, 1.0}); }
CrossSection unit_square() { return CrossSection::rectangle(1.0, 2.0, -0.5, 0.5); }

// Tabulated profile equal to x^2 outside [-1, 1] with a velocity bump inside,
// so the admissibility conditions only hold beyond s0 = 1.
TwistProfile bump_profile() {
    std::vector<double> xs, ts, ds;
    auto prim = [](double t) { return 5.0 * (t - 2.0 * t * t * t / 3.0 + std::pow(t, 5) / 5.0); };
    for (int i = 0; i <= 480; ++i) {
        const double x = -6.0 + 0.025 * i;
        xs.push_back(x);
        const double clamped = std::clamp(x, -1.0, 1.0);
        ts.push_back(x * x + prim(clamped) - prim(-1.0));
        ds.push_back(2.0 * x + (std::abs(x) < 1.0 ? 5.0 * std::pow(1.0 - x * x, 2) : 0.0));
    }
    return TwistProfile::tabulated(xs, ts, ds, 1.0);
}

}  // namespace

TEST_CASE("semiclassical constants match their closed forms") {
    CHECK(std::abs(semiclassical_constant(1.5, 3) - 1.0 / (64.0 * kPi)) <
          1e-12 / (64.0 * kPi));
    CHECK(std::abs(semiclassical_constant(2.5, 3) - 5.0 / (512.0 * kPi)) <
          1e-12 * 5.0 / (512.0 * kPi));
    CHECK(semiclassical_constant(0.0, 3) ==
          doctest::Approx(1.0 / (6.0 * kPi * kPi)).epsilon(1e-12));
    CHECK(semiclassical_constant(2.0, 3) ==
          doctest::Approx(4.0 / (105.0 * kPi * kPi)).epsilon(1e-12));
}

TEST_CASE("effective potential of the parabolic profile") {
    const auto profile = parabola();
    const EffectivePotential V(profile, PotentialVariant::Even);
    CHECK(V.plus_threshold() == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-12));
    CHECK(V.minus_threshold() == doctest::Approx(-std::sqrt(2.0 * kPi)).epsilon(1e-12));

    // f(x) = 4 (x^2 - pi) beyond the plateau, 0 inside.
    CHECK(V(3.0) == doctest::Approx(4.0 * (9.0 - kPi)).epsilon(1e-10));
    CHECK(V(-3.0) == doctest::Approx(4.0 * (9.0 - kPi)).epsilon(1e-10));
    CHECK(V(2.0) == 0.0);
    CHECK(V(0.0) == 0.0);
    CHECK(V(-2.5) == 0.0);  // |x| < sqrt(2 pi) ~ 2.5066

    // Eventual growth at the window scale.
    const double t = 3.0 * V.plus_threshold();
    CHECK(V(t) > V(t / 2.0));
    CHECK(V(t / 2.0) > 0.0);
}

TEST_CASE("effective potential of the odd family is even-symmetric for odd theta") {
    const auto profile = cubic();
    const EffectivePotential V(profile, PotentialVariant::Odd);
    CHECK(V.plus_threshold() > 0.0);
    CHECK(V.minus_threshold() == doctest::Approx(-V.plus_threshold()).epsilon(1e-10));
    CHECK(V(0.5 * V.plus_threshold()) == 0.0);
    for (double x : {1.05 * V.plus_threshold(), 2.0, 3.5}) {
        if (x < V.plus_threshold()) continue;
        CHECK(V(x) > 0.0);
        CHECK(V(-x) == doctest::Approx(V(x)).epsilon(1e-9));
    }
}

TEST_CASE("variant and family must agree") {
    CHECK_THROWS_AS(EffectivePotential(parabola(), PotentialVariant::Odd), ValidationError);
    CHECK_THROWS_AS(EffectivePotential(cubic(), PotentialVariant::Even), ValidationError);
    CHECK_THROWS_AS(EffectivePotential(parabola(), PotentialVariant::LocalizedEven),
                    ValidationError);  // no s0 on the profile
}

TEST_CASE("localized variant gates the potential beyond the resolved threshold") {
    const auto profile = bump_profile();
    const EffectivePotential V(profile, PotentialVariant::LocalizedEven);
    // theta(s0) = 1 + 16/3, so the threshold solves x^2 + 16/3 = theta(s0) + 2 pi.
    const double expected = std::sqrt(1.0 + 2.0 * kPi);
    CHECK(V.plus_threshold() == doctest::Approx(expected).epsilon(1e-6));
    CHECK(V.minus_threshold() == doctest::Approx(-expected).epsilon(1e-6));
    CHECK(V(0.5) == 0.0);
    CHECK(V(expected - 0.05) == 0.0);
    CHECK(V(expected + 0.05) > 0.0);
}

TEST_CASE("localized odd variant gates the potential beyond its threshold") {
    // dtheta = 1 + 3x^2 + 4(1 - x^2)_+^2: the bump breaks monotonicity on
    // R_+ inside |x| < 1, so the odd conditions only hold beyond s0 = 1.
    std::vector<double> xs, ts, ds;
    auto prim = [](double t) { return 4.0 * (t - 2.0 * t * t * t / 3.0 + std::pow(t, 5) / 5.0); };
    for (int i = 0; i <= 480; ++i) {
        const double x = -6.0 + 0.025 * i;
        xs.push_back(x);
        const double clamped = std::clamp(x, -1.0, 1.0);
        ts.push_back(x + x * x * x + prim(clamped));
        ds.push_back(1.0 + 3.0 * x * x + (std::abs(x) < 1.0 ? 4.0 * std::pow(1.0 - x * x, 2) : 0.0));
    }
    const auto profile = TwistProfile::tabulated(xs, ts, ds, 1.0);
    CHECK_THROWS_AS(EffectivePotential(profile, PotentialVariant::Odd), ValidationError);

    const EffectivePotential V(profile, PotentialVariant::LocalizedOdd);
    // theta(x) = x + x^3 + 32/15 beyond the bump; the plus threshold solves
    // x + x^3 = 2 pi + 2.
    double lo = 1.0, hi = 3.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid + mid * mid * mid < 2.0 * kPi + 2.0 ? lo : hi) = mid;
    }
    CHECK(V.plus_threshold() == doctest::Approx(lo).epsilon(1e-6));
    CHECK(V.minus_threshold() < -1.0);
    CHECK(V(0.5 * V.plus_threshold()) == 0.0);
    CHECK(V(V.plus_threshold() + 0.05) > 0.0);
    CHECK(V(V.minus_threshold() - 0.05) > 0.0);
}

TEST_CASE("bound matches the piecewise-polynomial oracle") {
    const auto profile = parabola();
    const auto cs = unit_square();

    BoundQuery q{1.5, 1.0, 0.5, PotentialVariant::Even, ConstantPolicy::semiclassical()};
    const BoundResult r = berezin_rhs(profile, cs, q);

    // Support is exactly the plateau: integral 2 sqrt(2 pi), rhs 1/(8 sqrt(pi)).
    CHECK(r.integral_value ==
          doctest::Approx(2.0 * std::sqrt(2.0 * kPi)).epsilon(1e-8));
    CHECK(r.rhs == doctest::Approx(1.0 / (8.0 * std::sqrt(kPi))).epsilon(1e-8));
    CHECK(r.support_plus.hi == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-9));
    CHECK(r.support_minus.lo == doctest::Approx(-std::sqrt(2.0 * kPi)).epsilon(1e-9));
    CHECK(r.l_sigma == doctest::Approx(1.0 / (64.0 * kPi)).epsilon(1e-12));

    // Tail regime, frozen regression value computed from the closed-form
    // oracle before the build.
    q.lambda = 100.0;
    const BoundResult r100 = berezin_rhs(profile, cs, q);
    CHECK(r100.rhs == doctest::Approx(107740.79540163396).epsilon(1e-9));
    CHECK(r100.rhs ==
          doctest::Approx(oracles::parabolic_bound_rhs(1.5, 100.0, 0.5, 1.0)).epsilon(1e-8));

    // Oracle agreement across a lambda sweep and another integer-power sigma.
    for (double lambda : {0.5, 2.0, 7.0, 31.0, 250.0}) {
        q.lambda = lambda;
        q.sigma = 1.5;
        CHECK(berezin_rhs(profile, cs, q).rhs ==
              doctest::Approx(oracles::parabolic_bound_rhs(1.5, lambda, 0.5, 1.0))
                  .epsilon(1e-8));
        q.sigma = 2.5;
        CHECK(berezin_rhs(profile, cs, q).rhs ==
              doctest::Approx(oracles::parabolic_bound_rhs(2.5, lambda, 0.5, 1.0))
                  .epsilon(1e-8));
    }
}

TEST_CASE("bound edge cases and scaling laws") {
    const auto profile = parabola();
    const auto cs = unit_square();

    // Lambda = 0: the integrand vanishes identically.
    BoundQuery q{1.5, 0.0, 0.5, PotentialVariant::Even, ConstantPolicy::semiclassical()};
    const BoundResult zero = berezin_rhs(profile, cs, q);
    CHECK(zero.rhs == 0.0);
    CHECK(zero.integral_value == 0.0);

    // Monotone nondecreasing in lambda.
    double prev = 0.0;
    for (double lambda : {0.0, 0.5, 1.0, 5.0, 20.0, 80.0}) {
        q.lambda = lambda;
        const double rhs = berezin_rhs(profile, cs, q).rhs;
        CHECK(rhs >= prev);
        prev = rhs;
    }

    // Exactly linear in the cross-section area.
    q.lambda = 7.0;
    const auto doubled = CrossSection::rectangle(1.0, 3.0, -0.5, 0.5);
    CHECK(doubled.area() == doctest::Approx(2.0));
    const double one = berezin_rhs(profile, cs, q).rhs;
    const double two = berezin_rhs(profile, doubled, q).rhs;
    CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-12));
}

TEST_CASE("constant policies") {
    const auto profile = parabola();
    const auto cs = unit_square();

    BoundQuery low{1.0, 1.0, 0.5, PotentialVariant::Even, ConstantPolicy::semiclassical()};
    CHECK_THROWS_AS(berezin_rhs(profile, cs, low), ValidationError);
    low.policy = ConstantPolicy::scaled(2.0);
    CHECK_NOTHROW(berezin_rhs(profile, cs, low));

    BoundQuery q{1.5, 3.0, 0.5, PotentialVariant::Even, ConstantPolicy::semiclassical()};
    const double semi = berezin_rhs(profile, cs, q).rhs;
    q.policy = ConstantPolicy::scaled(1.0);
    CHECK(berezin_rhs(profile, cs, q).rhs == doctest::Approx(semi).epsilon(1e-15));
    q.policy = ConstantPolicy::scaled(3.0);
    CHECK(berezin_rhs(profile, cs, q).rhs == doctest::Approx(3.0 * semi).epsilon(1e-12));

    CHECK_THROWS_AS(berezin_rhs(profile, cs,
                                BoundQuery{1.5, 1.0, 0.5, PotentialVariant::Even,
                                           ConstantPolicy::scaled(-1.0)}),
                    ValidationError);
}

TEST_CASE("epsilon optimization") {
    const auto profile = parabola();
    const auto cs = unit_square();

    const auto zero = optimize_epsilon(profile, cs, 1.5, 0.0, PotentialVariant::Even,
                                       ConstantPolicy::semiclassical());
    CHECK(zero.epsilon_star == 0.5);
    CHECK(zero.rhs_star == 0.0);

    const auto opt = optimize_epsilon(profile, cs, 1.5, 1.0, PotentialVariant::Even,
                                      ConstantPolicy::semiclassical());
    BoundQuery fixed{1.5, 1.0, 0.5, PotentialVariant::Even, ConstantPolicy::semiclassical()};
    const double at_half = berezin_rhs(profile, cs, fixed).rhs;
    CHECK(opt.rhs_star <= at_half);

    // Local-minimum certificate.
    for (double de : {-1e-4, 1e-4}) {
        const double eps = opt.epsilon_star + de;
        if (eps <= 0.0 || eps >= 1.0) continue;
        fixed.epsilon = eps;
        CHECK(berezin_rhs(profile, cs, fixed).rhs >= opt.rhs_star * (1.0 - 1e-6));
    }

    // The optimize tag flows through berezin_rhs.
    BoundQuery open{1.5, 1.0, std::nullopt, PotentialVariant::Even,
                    ConstantPolicy::semiclassical()};
    const BoundResult via_rhs = berezin_rhs(profile, cs, open);
    CHECK(via_rhs.epsilon_used == doctest::Approx(opt.epsilon_star).epsilon(1e-12));
    CHECK(via_rhs.rhs == doctest::Approx(opt.rhs_star).epsilon(1e-12));
}

TEST_CASE("asymptotic surrogate") {
    const auto profile = parabola();
    const auto cs = unit_square();

    BoundQuery q{1.5, 1.0, 0.5, PotentialVariant::Even, ConstantPolicy::semiclassical()};
    const AsymptoticResult a = asymptotic_rhs(profile, cs, q);
    CHECK(a.integral_value ==
          doctest::Approx(std::sqrt(2.0) * 16.0 / 35.0).epsilon(1e-8));
    CHECK(a.integral_value ==
          doctest::Approx(oracles::parabolic_surrogate_integral(1.0, 0.5, 3)).epsilon(1e-8));
    CHECK(a.value == doctest::Approx(1.0 / (64.0 * kPi) / std::pow(0.5, 1.5) *
                                     a.integral_value)
                         .epsilon(1e-10));

    // Displacement constants: sup_x |sqrt(x^2 - pi) - x| = sqrt(pi) at the
    // domain edge for the parabola.
    CHECK(a.k1 == doctest::Approx(std::sqrt(kPi)).epsilon(1e-6));
    CHECK(a.k2 == doctest::Approx(std::sqrt(kPi)).epsilon(1e-6));

    q.lambda = 0.0;
    CHECK(asymptotic_rhs(profile, cs, q).value == 0.0);

    // Ratio approaches 1 from above as lambda grows.
    double prev_ratio = 1e300;
    for (double lambda : {100.0, 1000.0}) {
        q.lambda = lambda;
        const double rhs = berezin_rhs(profile, cs, q).rhs;
        const double ratio = rhs / asymptotic_rhs(profile, cs, q).value;
        CHECK(ratio > 1.0);
        CHECK(ratio < prev_ratio);
        prev_ratio = ratio;
    }
}

TEST_CASE("classical Berezin comparator") {
    const auto cs = unit_square();
    CHECK(classical_berezin(cs, 50.0, 1.5, 10.0) ==
          doctest::Approx(1.0 / (64.0 * kPi) * 1000.0 * 50.0).epsilon(1e-12));
    CHECK(classical_berezin(cs, 50.0, 1.5, 0.0) == 0.0);
    CHECK_THROWS_AS(classical_berezin(cs, 50.0, 0.5, 10.0), ValidationError);
    CHECK_NOTHROW(classical_berezin(cs, 50.0, 0.5, 10.0, ConstantPolicy::scaled(2.0)));
    CHECK_THROWS_AS(classical_berezin(cs, 0.0, 1.5, 10.0), ValidationError);
}

TEST_CASE("localized bound evaluates over the gated support") {
    const auto profile = bump_profile();
    const auto cs = unit_square();
    BoundQuery q{1.5, 1.0, 0.5, PotentialVariant::LocalizedEven,
                 ConstantPolicy::semiclassical()};
    const BoundResult r = berezin_rhs(profile, cs, q);
    // The potential jumps well above lambda/eps at the localized threshold,
    // so the support is exactly the gated plateau.
    const double threshold = std::sqrt(1.0 + 2.0 * kPi);
    CHECK(r.integral_value == doctest::Approx(2.0 * threshold).epsilon(1e-6));
    CHECK(r.support_plus.hi == doctest::Approx(threshold).epsilon(1e-6));
}

TEST_CASE("effective potentials are nonnegative everywhere") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    const EffectivePotential even(TwistProfile::even_poly({0.3, 0.7, 0.1}),
                                  PotentialVariant::Even);
    const EffectivePotential odd(TwistProfile::odd_poly({0.2, 0.5}), PotentialVariant::Odd);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng);
        CHECK(even(x) >= 0.0);
        CHECK(odd(x) >= 0.0);
    }
}

TEST_CASE("counting bound (sigma = 0) runs under a scaled policy") {
    const BoundQuery q{0.0, 5.0, 0.5, PotentialVariant::Even, ConstantPolicy::scaled(2.0)};
    const BoundResult r = berezin_rhs(parabola(), unit_square(), q);
    CHECK(r.rhs > 0.0);
    CHECK(r.l_sigma == doctest::Approx(2.0 / (6.0 * std::numbers::pi * std::numbers::pi))
                           .epsilon(1e-12));
}

TEST_CASE("tabulated profiles refuse supports that outgrow their window") {
    // The sampled window ends at |x| = 6 where eps f ~ 2 (6^2 - pi) < lambda:
    // the support search cannot complete and must fail loudly.
    std::vector<double> xs, ts, ds;
    for (int i = 0; i <= 240; ++i) {
        const double x = -6.0 + 0.05 * i;
        xs.push_back(x);
        ts.push_back(x * x);
        ds.push_back(2.0 * x);
    }
    const auto tab = TwistProfile::tabulated(xs, ts, ds);
    const BoundQuery q{1.5, 500.0, 0.5, PotentialVariant::Even,
                       ConstantPolicy::semiclassical()};
    CHECK_THROWS_AS(berezin_rhs(tab, unit_square(), q), NumericalError);
}

TEST_CASE("query validation") {
    CHECK_THROWS_AS(validate(BoundQuery{-1.0, 1.0, 0.5, PotentialVariant::Even,
                                        ConstantPolicy::semiclassical()}),
                    ValidationError);
    CHECK_THROWS_AS(validate(BoundQuery{1.5, -1.0, 0.5, PotentialVariant::Even,
                                        ConstantPolicy::semiclassical()}),
                    ValidationError);
    CHECK_THROWS_AS(validate(BoundQuery{1.5, 1.0, 1.5, PotentialVariant::Even,
                                        ConstantPolicy::semiclassical()}),
                    ValidationError);
    CHECK_THROWS_AS(validate(BoundQuery{1.5, 1.0, 0.0, PotentialVariant::Even,
                                        ConstantPolicy::semiclassical()}),
                    ValidationError);
}
