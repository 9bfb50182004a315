#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "twistbound/errors.hpp"
#include "twistbound/twist_profile.hpp"

using namespace twistbound;

namespace {

TwistProfile parabola() { return TwistProfile::even_poly({0.0, 1.0}); }      // x^2
TwistProfile cubic() { return TwistProfile::odd_poly({1.0, 1.0}); }          // x + x^3

// Tabulated copy of x^2 on [-6, 6].
TwistProfile tabulated_parabola() {
    std::vector<double> x, t, d;
    for (int i = 0; i <= 240; ++i) {
        x.push_back(-6.0 + 0.05 * i);
        t.push_back(x.back() * x.back());
        d.push_back(2.0 * x.back());
    }
    return TwistProfile::tabulated(x, t, d);
}

}  // namespace

TEST_CASE("polynomial evaluation") {
    const auto even = parabola();
    CHECK(even.theta(3.0) == doctest::Approx(9.0));
    CHECK(even.dtheta(3.0) == doctest::Approx(6.0));
    CHECK(even.theta(0.0) == 0.0);
    CHECK(even.dtheta(0.0) == 0.0);

    const auto odd = cubic();
    CHECK(odd.theta(-2.0) == doctest::Approx(-10.0));
    CHECK(odd.dtheta(-2.0) == doctest::Approx(13.0));
}

TEST_CASE("family constraints are enforced") {
    CHECK_THROWS_AS(TwistProfile::even_poly({1.0}), ValidationError);         // m = 0
    CHECK_THROWS_AS(TwistProfile::even_poly({0.0, -1.0}), ValidationError);   // A_1 < 0
    CHECK_THROWS_AS(TwistProfile::even_poly({0.0, 1.0, 0.0}), ValidationError);  // A_m = 0
    CHECK_THROWS_AS(TwistProfile::odd_poly({-1.0}), ValidationError);
    CHECK_NOTHROW(TwistProfile::even_poly({-2.5, 0.0, 1.0}));  // A_0 may be negative
    CHECK_NOTHROW(TwistProfile::odd_poly({1.0}));              // theta = x
}

TEST_CASE("branch inverses of the parabola") {
    const auto p = parabola();
    CHECK(p.branch_inverse(Branch::Plus, 4.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.branch_inverse(Branch::Minus, 4.0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(p.branch_inverse(Branch::Plus, 0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(p.branch_inverse(Branch::Plus, -1.0), DomainError);
}

TEST_CASE("branch inverses of the odd family") {
    const auto p = cubic();
    CHECK(p.branch_inverse(Branch::Plus, 10.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.branch_inverse(Branch::Minus, -10.0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK_THROWS_AS(p.branch_inverse(Branch::Minus, 1.0), DomainError);  // above theta(0)
}

TEST_CASE("odd family with an angle offset") {
    const auto p = TwistProfile::odd_poly({1.0, 1.0}, 2.0);  // theta = 2 + x + x^3
    CHECK(p.theta0() == 2.0);
    CHECK(p.theta(1.0) == doctest::Approx(4.0));
    CHECK(p.dtheta(1.0) == doctest::Approx(4.0));
    CHECK(p.branch_inverse(Branch::Plus, 12.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.branch_inverse(Branch::Minus, -8.0) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("branch inverse round trip and monotonicity") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ux(0.0, 5.0);
    const auto even = TwistProfile::even_poly({0.5, 0.3, 0.2});
    const auto odd = TwistProfile::odd_poly({0.1, 0.4});
    for (int i = 0; i < 40; ++i) {
        const double x = ux(rng);
        CHECK(even.branch_inverse(Branch::Plus, even.theta(x)) ==
              doctest::Approx(x).epsilon(1e-10));
        CHECK(even.branch_inverse(Branch::Minus, even.theta(-x)) ==
              doctest::Approx(-x).epsilon(1e-10));
        CHECK(odd.branch_inverse(Branch::Plus, odd.theta(x)) ==
              doctest::Approx(x).epsilon(1e-10));
        CHECK(odd.branch_inverse(Branch::Minus, odd.theta(-x)) ==
              doctest::Approx(-x).epsilon(1e-10));
    }

    double prev_plus = even.branch_inverse(Branch::Plus, even.theta0());
    double prev_minus = even.branch_inverse(Branch::Minus, even.theta0());
    for (double alpha = even.theta0() + 0.5; alpha < even.theta0() + 20.0; alpha += 0.5) {
        const double zp = even.branch_inverse(Branch::Plus, alpha);
        const double zm = even.branch_inverse(Branch::Minus, alpha);
        CHECK(zp > prev_plus);
        CHECK(zm < prev_minus);
        prev_plus = zp;
        prev_minus = zm;
    }
}

TEST_CASE("derivative agrees with central differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-4.0, 4.0);
    for (const auto& profile :
         {parabola(), cubic(), TwistProfile::even_poly({1.0, 0.2, 0.0, 0.05})}) {
        for (int i = 0; i < 10; ++i) {
            const double x = ux(rng);
            const double h = 1e-5;
            const double fd =
                (profile.theta(x + h) - profile.theta(x - h)) / (2.0 * h);
            // Central differences are O(h^2); scale tolerance with curvature.
            CHECK(std::abs(fd - profile.dtheta(x)) < 1e-7 * (1.0 + std::abs(profile.dtheta(x))));
        }
    }
}

TEST_CASE("validate_conditions classifies the reference profiles") {
    const Interval window{-10.0, 10.0};

    const auto even = validate_conditions(parabola(), window, 10.0);
    CHECK(even.even_conditions_ok);
    CHECK(!even.odd_conditions_ok);
    CHECK(even.explosion_ok);  // |dtheta(+-10)| = 20
    CHECK(even.effective_s0 == 0.0);

    const auto odd = validate_conditions(cubic(), window, 10.0);
    CHECK(odd.odd_conditions_ok);
    CHECK(!odd.even_conditions_ok);
    CHECK(odd.explosion_ok);

    // Constant twisting velocity never explodes.
    const auto slow = validate_conditions(TwistProfile::odd_poly({1.0}), window, 10.0);
    CHECK(slow.odd_conditions_ok);
    CHECK(!slow.explosion_ok);
}

TEST_CASE("validate_conditions rejects bad arguments") {
    CHECK_THROWS_AS(validate_conditions(parabola(), {-3.0, 5.0}, 1.0), ValidationError);
    CHECK_THROWS_AS(validate_conditions(parabola(), {-3.0, 3.0}, 0.0), ValidationError);
}

TEST_CASE("tabulated profile reproduces its source and guards its window") {
    const auto tab = tabulated_parabola();
    for (double x : {-5.3, -1.7, 0.0, 0.42, 3.9}) {
        CHECK(tab.theta(x) == doctest::Approx(x * x).epsilon(1e-6));
        CHECK(tab.dtheta(x) == doctest::Approx(2.0 * x).epsilon(1e-6));
    }
    CHECK_THROWS_AS(tab.eval(6.5), DomainError);
    CHECK(tab.branch_inverse(Branch::Plus, 4.0) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK_THROWS_AS(tab.branch_inverse(Branch::Plus, 100.0), DomainError);  // beyond window

    const auto report = validate_conditions(tab, {-6.0, 6.0}, 10.0);
    CHECK(report.even_conditions_ok);
    CHECK(report.explosion_ok);
}

TEST_CASE("non-monotone tabulated branch is rejected by branch_inverse") {
    // theta wiggles on the plus side.
    std::vector<double> x, t, d;
    for (int i = 0; i <= 60; ++i) {
        const double xi = -3.0 + 0.1 * i;
        x.push_back(xi);
        t.push_back(xi + std::sin(2.0 * xi));
        d.push_back(1.0 + 2.0 * std::cos(2.0 * xi));
    }
    const auto tab = TwistProfile::tabulated(x, t, d);
    CHECK_THROWS_AS(tab.branch_inverse(Branch::Plus, 1.0), ValidationError);
}

TEST_CASE("validate_conditions finds the localized threshold") {
    // dtheta = 2x + 5 (1 - x^2)^2 on [-1, 1], = 2x outside: the even
    // conditions fail inside |x| < 1 and hold beyond it.
    std::vector<double> xs, ts, ds;
    auto bump = [](double x) { return std::abs(x) < 1.0 ? 5.0 * std::pow(1.0 - x * x, 2) : 0.0; };
    auto bump_integral = [](double x) {
        // antiderivative of 5 (1-t^2)^2 from -1 to x, clamped
        auto prim = [](double t) { return 5.0 * (t - 2.0 * t * t * t / 3.0 + std::pow(t, 5) / 5.0); };
        if (x <= -1.0) return 0.0;
        const double upper = std::min(x, 1.0);
        return prim(upper) - prim(-1.0);
    };
    for (int i = 0; i <= 480; ++i) {
        const double x = -6.0 + 0.025 * i;
        xs.push_back(x);
        ts.push_back(x * x + bump_integral(x));
        ds.push_back(2.0 * x + bump(x));
    }
    const auto tab = TwistProfile::tabulated(xs, ts, ds, 1.0);
    const auto report = validate_conditions(tab, {-6.0, 6.0}, 10.0);
    CHECK(!report.even_conditions_ok);
    CHECK(!report.odd_conditions_ok);
    // The binding violation is the monotonicity dip of dtheta on the plus
    // side; it ends where 20 x (1 - x^2) = 2, just below the bump edge.
    double lo = 0.9, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (20.0 * mid * (1.0 - mid * mid) > 2.0 ? lo : hi) = mid;
    }
    CHECK(report.effective_s0 == doctest::Approx(lo).epsilon(0.01));
    CHECK(report.explosion_ok);
}
