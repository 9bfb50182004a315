#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "twistbound/bound.hpp"
#include "twistbound/errors.hpp"
#include "twistbound/slice_geometry.hpp"

using namespace twistbound;

namespace {

constexpr double kPi = std::numbers::pi;
const double kA = std::asin(1.0 / 3.0);

TwistProfile parabola() { return TwistProfile::even_poly({0.0, 1.0}); }
CrossSection unit_square() { return CrossSection::rectangle(1.0, 2.0, -0.5, 0.5); }

}  // namespace

TEST_CASE("slice intervals of the reference configuration") {
    const auto si = slice_intervals(parabola(), unit_square(), {1.5, 0.0}, {0.0, 4.0});
    REQUIRE(si.intervals.size() == 3);

    // Closed form: x in sqrt(2 pi k +- arcsin(1/3)).
    CHECK(si.intervals[0].a == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(si.intervals[0].b == doctest::Approx(std::sqrt(kA)).epsilon(1e-9));
    CHECK(si.intervals[0].partial());  // abuts the window edge
    CHECK(si.intervals[0].clipped_lo);
    CHECK(!si.intervals[0].clipped_hi);

    CHECK(si.intervals[1].a == doctest::Approx(std::sqrt(2.0 * kPi - kA)).epsilon(1e-9));
    CHECK(si.intervals[1].b == doctest::Approx(std::sqrt(2.0 * kPi + kA)).epsilon(1e-9));
    CHECK(!si.intervals[1].partial());

    CHECK(si.intervals[2].a == doctest::Approx(std::sqrt(4.0 * kPi - kA)).epsilon(1e-9));
    CHECK(si.intervals[2].b == doctest::Approx(std::sqrt(4.0 * kPi + kA)).epsilon(1e-9));
    CHECK(!si.intervals[2].partial());
}

TEST_CASE("slice set is empty off the radial range and mirrors under x -> -x") {
    CHECK(slice_intervals(parabola(), unit_square(), {0.5, 0.0}, {0.0, 4.0}).intervals.empty());

    const auto plus = slice_intervals(parabola(), unit_square(), {1.5, 0.0}, {0.0, 4.0});
    const auto minus = slice_intervals(parabola(), unit_square(), {1.5, 0.0}, {-4.0, 0.0});
    REQUIRE(plus.intervals.size() == minus.intervals.size());
    for (std::size_t i = 0; i < plus.intervals.size(); ++i) {
        const auto& p = plus.intervals[i];
        const auto& m = minus.intervals[minus.intervals.size() - 1 - i];
        CHECK(p.a == doctest::Approx(-m.b).epsilon(1e-9));
        CHECK(p.b == doctest::Approx(-m.a).epsilon(1e-9));
    }
}

TEST_CASE("intervals merge across the even profile's branch point") {
    const auto si = slice_intervals(parabola(), unit_square(), {1.5, 0.0}, {-4.0, 4.0});
    REQUIRE(si.intervals.size() == 5);
    const auto& middle = si.intervals[2];
    CHECK(middle.a == doctest::Approx(-std::sqrt(kA)).epsilon(1e-9));
    CHECK(middle.b == doctest::Approx(std::sqrt(kA)).epsilon(1e-9));
    CHECK(!middle.partial());
}

TEST_CASE("slice rejects the rotation axis") {
    CHECK_THROWS_AS(slice_intervals(parabola(), unit_square(), {0.0, 0.0}, {0.0, 4.0}),
                    DomainError);
}

TEST_CASE("straight tube slices are whole-window or empty") {
    std::vector<double> x{-5.0, 0.0, 5.0}, t{0.0, 0.0, 0.0}, d{0.0, 0.0, 0.0};
    const auto straight = TwistProfile::tabulated(x, t, d);
    const auto inside = slice_intervals(straight, unit_square(), {1.5, 0.0}, {-4.0, 4.0});
    REQUIRE(inside.intervals.size() == 1);
    CHECK(inside.intervals[0].a == doctest::Approx(-4.0));
    CHECK(inside.intervals[0].b == doctest::Approx(4.0));
    CHECK(inside.intervals[0].partial());

    const auto outside = slice_intervals(straight, unit_square(), {1.5, 0.9}, {-4.0, 4.0});
    CHECK(outside.intervals.empty());
}

TEST_CASE("rotation laws on the reference configuration") {
    const auto profile = parabola();
    const auto si = slice_intervals(profile, unit_square(), {1.5, 0.0}, {0.0, 4.0});
    const auto report = check_slice_laws(si, profile);
    CHECK(report.all_ok());

    // Complete intervals rotate by exactly 2 arcsin(1/3).
    REQUIRE(report.rotations.size() == 2);
    for (const auto& e : report.rotations) CHECK(e.delta == doctest::Approx(2.0 * kA).epsilon(1e-8));

    // Gaps rotate by 2 pi - 2 arcsin(1/3) >= pi; the first gap follows the
    // partial interval but both of its endpoints are true crossings.
    REQUIRE(report.gaps.size() == 2);
    for (const auto& e : report.gaps)
        CHECK(e.delta == doctest::Approx(2.0 * kPi - 2.0 * kA).epsilon(1e-8));
}

TEST_CASE("law report is vacuous for a single complete interval") {
    const auto profile = parabola();
    const auto si = slice_intervals(profile, unit_square(), {1.5, 0.0}, {2.3, 2.7});
    REQUIRE(si.intervals.size() == 1);
    CHECK(!si.intervals[0].partial());
    const auto report = check_slice_laws(si, profile);
    CHECK(report.gaps.empty());
    CHECK(report.all_ok());
}

TEST_CASE("random profiles agree with the dense-sampling oracle") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    for (int trial = 0; trial < 24; ++trial) {
        TwistProfile profile =
            trial % 2 == 0
                ? TwistProfile::even_poly({4.0 * (u(rng) - 0.5), 0.2 + u(rng), 0.5 * u(rng)})
                : TwistProfile::odd_poly({u(rng), 0.2 + u(rng)});
        const double x_lo = 0.3 + u(rng);
        const auto cs = CrossSection::rectangle(x_lo, x_lo + 0.4 + u(rng), -0.5 - u(rng),
                                                0.3 + u(rng));
        const double r = cs.r_min() + (0.1 + 0.8 * u(rng)) * (cs.r_max() - cs.r_min());
        const double phi = kPi * (2.0 * u(rng) - 1.0);
        const Vec2d y(r * std::cos(phi), r * std::sin(phi));

        const double w = profile.branch_inverse(Branch::Plus, profile.theta0() + 6.0 * kPi) + 0.5;
        const Interval window{-w, w};

        const auto si = slice_intervals(profile, cs, y, window);
        const auto scanned = oracles::scan_slices(profile, cs, y, window);

        // Every scanned interval matches a computed one to 2e-4.
        for (const auto& sc : scanned) {
            bool matched = false;
            for (const auto& iv : si.intervals)
                matched = matched || (std::abs(iv.a - sc.a) <= 2e-4 &&
                                      std::abs(iv.b - sc.b) <= 2e-4);
            CHECK(matched);
        }
        // Every computed interval of meaningful width is found by the scan.
        std::size_t wide = 0;
        for (const auto& iv : si.intervals)
            if (iv.length() > 5e-4) ++wide;
        CHECK(wide <= scanned.size());

        const auto report = check_slice_laws(si, profile);
        for (const auto& e : report.rotations) CHECK(e.ok);
        // The gap law only holds when the circle meets the polygon in a
        // single arc; with several arcs the tool reports the short gaps.
        if (cs.admissible_angles(r).intervals().size() == 1)
            for (const auto& e : report.gaps) CHECK(e.ok);
    }
}

TEST_CASE("short gaps between angular components are reported, not asserted") {
    // On the reference square, radii in (2, sqrt(4.25)) meet the polygon in
    // two arcs separated by less than pi.
    const auto profile = parabola();
    const auto cs = unit_square();
    const Vec2d y(2.03, 0.0);
    REQUIRE(cs.admissible_angles(y.norm()).intervals().size() == 2);

    const auto si = slice_intervals(profile, cs, y, {0.0, 5.0});
    const auto report = check_slice_laws(si, profile);
    for (const auto& e : report.rotations) CHECK(e.ok);

    bool found_short_gap = false;
    for (const auto& e : report.gaps)
        if (!e.ok) {
            found_short_gap = true;
            CHECK(e.delta < kPi);
        }
    CHECK(found_short_gap);
    CHECK(!report.all_ok());
}

TEST_CASE("Friedrichs consistency links the potential to the slice widths") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    for (int trial = 0; trial < 16; ++trial) {
        const bool even = trial % 2 == 0;
        TwistProfile profile = even
                                   ? TwistProfile::even_poly({u(rng), 0.3 + u(rng)})
                                   : TwistProfile::odd_poly({0.5 * u(rng), 0.3 + u(rng)});
        const EffectivePotential V(profile,
                                   even ? PotentialVariant::Even : PotentialVariant::Odd);
        const auto cs = CrossSection::rectangle(0.8 + u(rng), 2.2 + u(rng), -0.6, 0.5);
        const double r = cs.r_min() + (0.2 + 0.6 * u(rng)) * (cs.r_max() - cs.r_min());
        const Vec2d y(r, 0.0);

        const double w = profile.branch_inverse(Branch::Plus, profile.theta0() + 8.0 * kPi) + 0.5;
        const auto si = slice_intervals(profile, cs, y, {-w, w});
        const double gate = profile.theta0() + kPi;

        for (const auto& iv : si.intervals) {
            if (iv.partial() || iv.a <= 0.0) continue;
            if (profile.theta(iv.a) < gate) continue;
            const double cap = (1.0 + 1e-6) * kPi * kPi / (iv.length() * iv.length());
            for (int j = 0; j <= 16; ++j) {
                const double x = iv.a + iv.length() * j / 16.0;
                CHECK(V(x) <= cap);
            }
        }
    }
}
