#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twistbound/bound.hpp"
#include "twistbound/cross_section.hpp"
#include "twistbound/grid.hpp"
#include "twistbound/twist_profile.hpp"

namespace twistbound {

struct GridConfig {
    std::optional<Interval> window;  // empty: derived from the bound query
    std::vector<double> h_values;    // coarse to fine, each half the previous
    double padding = 0.25;
};

struct SliceConfig {
    std::vector<Vec2d> points;
    int sample_count = 0;  // additional random transversal points
    std::optional<Interval> window;
};

struct GeometryConfig {
    int axial_samples = 128;
    int boundary_samples = 64;
};

/// Parsed and validated run configuration. Parse-time validation mirrors the
/// module preconditions; errors carry the offending field path.
struct RunConfig {
    std::optional<TwistProfile> profile;
    std::optional<CrossSection> cross_section;

    std::vector<double> sigmas;
    std::vector<double> lambdas;
    std::optional<double> epsilon;  // nullopt: optimize
    PotentialVariant variant = PotentialVariant::Even;
    ConstantPolicy policy = ConstantPolicy::semiclassical();

    GridConfig grids;
    SliceConfig slices;
    GeometryConfig geometry;
    std::vector<double> tube_lengths;

    std::string output_dir = ".";
    std::uint64_t seed = 0;
    int threads = 0;  // 0: hardware concurrency

    std::string config_hash;  // FNV-1a of the raw file bytes

    /// Cross product of the sigma and lambda lists.
    std::vector<BoundQuery> bound_queries() const;

    const TwistProfile& require_profile() const;
    const CrossSection& require_cross_section() const;
};

/// Loads and validates a configuration file (JSON). Throws ValidationError
/// with field-path diagnostics; no computation happens on invalid input.
RunConfig load_config(const std::string& path);

/// Same, from an in-memory document (used by tests).
RunConfig parse_config(const std::string& text, const std::string& origin = "<memory>");

}  // namespace twistbound
