#include "twistbound/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "twistbound/errors.hpp"
#include "twistbound/io.hpp"

namespace twistbound {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError(path + ": " + msg);
}

const json& member(const json& j, const std::string& path, const char* key) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required field");
    return *it;
}

const json* optional_member(const json& j, const std::string& path, const char* key) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> as_number_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Interval as_interval(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected [lo, hi]");
    Interval w{as_number(j[0], path + "[0]"), as_number(j[1], path + "[1]")};
    if (!(w.lo < w.hi)) fail(path, "lo must be < hi");
    return w;
}

TwistProfile parse_profile(const json& j, const std::string& path) {
    const std::string family = as_string(member(j, path, "family"), path + ".family");
    std::optional<double> s0;
    if (const json* s = optional_member(j, path, "s0")) {
        s0 = as_number(*s, path + ".s0");
        if (!(*s0 >= 0.0)) fail(path + ".s0", "must be >= 0");
    }
    try {
        if (family == "even_poly") {
            return TwistProfile::even_poly(
                as_number_list(member(j, path, "coefficients"), path + ".coefficients"), s0);
        }
        if (family == "odd_poly") {
            double theta0 = 0.0;
            if (const json* t = optional_member(j, path, "theta0"))
                theta0 = as_number(*t, path + ".theta0");
            return TwistProfile::odd_poly(
                as_number_list(member(j, path, "coefficients"), path + ".coefficients"), theta0,
                s0);
        }
        if (family == "tabulated") {
            const json& samples = member(j, path, "samples");
            const std::string spath = path + ".samples";
            return TwistProfile::tabulated(
                as_number_list(member(samples, spath, "x"), spath + ".x"),
                as_number_list(member(samples, spath, "theta"), spath + ".theta"),
                as_number_list(member(samples, spath, "dtheta"), spath + ".dtheta"), s0);
        }
    } catch (const ValidationError& e) {
        fail(path, e.what());
    }
    fail(path + ".family", "unknown family '" + family +
                               "' (expected even_poly, odd_poly, or tabulated)");
}

CrossSection parse_cross_section(const json& j, const std::string& path) {
    const json& verts = member(j, path, "vertices");
    if (!verts.is_array() || verts.size() < 3)
        fail(path + ".vertices", "expected an array of at least 3 [x2, x3] points");
    std::vector<Vec2d> points;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const std::string vp = path + ".vertices[" + std::to_string(i) + "]";
        if (!verts[i].is_array() || verts[i].size() != 2) fail(vp, "expected [x2, x3]");
        points.emplace_back(as_number(verts[i][0], vp + "[0]"), as_number(verts[i][1], vp + "[1]"));
    }
    try {
        return CrossSection::polygon(std::move(points));
    } catch (const ValidationError& e) {
        fail(path + ".vertices", e.what());
    }
}

PotentialVariant parse_variant(const json& j, const std::string& path) {
    const std::string v = as_string(j, path);
    if (v == "even") return PotentialVariant::Even;
    if (v == "odd") return PotentialVariant::Odd;
    if (v == "localized_even") return PotentialVariant::LocalizedEven;
    if (v == "localized_odd") return PotentialVariant::LocalizedOdd;
    fail(path, "unknown variant '" + v + "'");
}

ConstantPolicy parse_policy(const json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "semiclassical") return ConstantPolicy::semiclassical();
        fail(path, "expected \"semiclassical\" or {\"scaled\": factor}");
    }
    if (j.is_object() && j.contains("scaled")) {
        const double factor = as_number(j["scaled"], path + ".scaled");
        if (!(factor > 0.0)) fail(path + ".scaled", "must be > 0");
        return ConstantPolicy::scaled(factor);
    }
    fail(path, "expected \"semiclassical\" or {\"scaled\": factor}");
}

}  // namespace

std::vector<BoundQuery> RunConfig::bound_queries() const {
    std::vector<BoundQuery> out;
    for (double sigma : sigmas)
        for (double lambda : lambdas) out.push_back({sigma, lambda, epsilon, variant, policy});
    return out;
}

const TwistProfile& RunConfig::require_profile() const {
    if (!profile) throw ValidationError("profile: missing");
    return *profile;
}

const CrossSection& RunConfig::require_cross_section() const {
    if (!cross_section) throw ValidationError("cross_section: missing");
    return *cross_section;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(origin + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError(origin + ": top level must be an object");

    RunConfig cfg;
    cfg.config_hash = io::hex64(io::fnv1a64(text));

    cfg.profile = parse_profile(member(j, "config", "profile"), "profile");
    cfg.cross_section = parse_cross_section(member(j, "config", "cross_section"), "cross_section");

    if (const json* bound = optional_member(j, "config", "bound")) {
        const std::string bp = "bound";
        cfg.sigmas = as_number_list(member(*bound, bp, "sigma"), bp + ".sigma");
        cfg.lambdas = as_number_list(member(*bound, bp, "lambda"), bp + ".lambda");
        for (std::size_t i = 0; i < cfg.sigmas.size(); ++i)
            if (!(cfg.sigmas[i] >= 0.0)) fail(bp + ".sigma[" + std::to_string(i) + "]", "must be >= 0");
        for (std::size_t i = 0; i < cfg.lambdas.size(); ++i)
            if (!(cfg.lambdas[i] >= 0.0))
                fail(bp + ".lambda[" + std::to_string(i) + "]", "must be >= 0");
        if (const json* eps = optional_member(*bound, bp, "epsilon")) {
            if (eps->is_string()) {
                if (eps->get<std::string>() != "optimize")
                    fail(bp + ".epsilon", "expected a number in (0,1) or \"optimize\"");
            } else {
                const double e = as_number(*eps, bp + ".epsilon");
                if (!(e > 0.0 && e < 1.0)) fail(bp + ".epsilon", "must lie in (0, 1)");
                cfg.epsilon = e;
            }
        }
        if (const json* v = optional_member(*bound, bp, "variant"))
            cfg.variant = parse_variant(*v, bp + ".variant");
        if (const json* p = optional_member(*bound, bp, "constant_policy"))
            cfg.policy = parse_policy(*p, bp + ".constant_policy");

        // Mirror the module precondition now, before any computation.
        for (double sigma : cfg.sigmas) {
            BoundQuery probe{sigma, 0.0, cfg.epsilon, cfg.variant, cfg.policy};
            try {
                validate(probe);
            } catch (const ValidationError& e) {
                fail(bp, e.what());
            }
        }
        try {
            EffectivePotential check(*cfg.profile, cfg.variant);
        } catch (const ValidationError& e) {
            fail("bound.variant", e.what());
        }
    }

    if (const json* grids = optional_member(j, "config", "grids")) {
        const std::string gp = "grids";
        if (const json* w = optional_member(*grids, gp, "window"))
            if (!(w->is_string() && w->get<std::string>() == "auto"))
                cfg.grids.window = as_interval(*w, gp + ".window");
        cfg.grids.h_values = as_number_list(member(*grids, gp, "h"), gp + ".h");
        for (std::size_t i = 0; i < cfg.grids.h_values.size(); ++i) {
            if (!(cfg.grids.h_values[i] > 0.0))
                fail(gp + ".h[" + std::to_string(i) + "]", "must be > 0");
            if (i > 0 && std::abs(cfg.grids.h_values[i] - 0.5 * cfg.grids.h_values[i - 1]) >
                             1e-9 * cfg.grids.h_values[i - 1])
                fail(gp + ".h[" + std::to_string(i) + "]", "must halve the previous value");
        }
        if (const json* p = optional_member(*grids, gp, "padding"))
            cfg.grids.padding = as_number(*p, gp + ".padding");
    }

    if (const json* slices = optional_member(j, "config", "slices")) {
        const std::string sp = "slices";
        if (const json* pts = optional_member(*slices, sp, "points")) {
            if (!pts->is_array()) fail(sp + ".points", "expected an array of [y2, y3] points");
            for (std::size_t i = 0; i < pts->size(); ++i) {
                const std::string pp = sp + ".points[" + std::to_string(i) + "]";
                if (!(*pts)[i].is_array() || (*pts)[i].size() != 2) fail(pp, "expected [y2, y3]");
                Vec2d y((*pts)[i][0].get<double>(), (*pts)[i][1].get<double>());
                if (y.norm() == 0.0) fail(pp, "transversal point must not be the origin");
                cfg.slices.points.push_back(y);
            }
        }
        if (const json* c = optional_member(*slices, sp, "sample_count")) {
            cfg.slices.sample_count = as_int(*c, sp + ".sample_count");
            if (cfg.slices.sample_count < 0) fail(sp + ".sample_count", "must be >= 0");
        }
        if (const json* w = optional_member(*slices, sp, "window"))
            cfg.slices.window = as_interval(*w, sp + ".window");
    }

    if (const json* cmp = optional_member(j, "config", "compare")) {
        cfg.tube_lengths =
            as_number_list(member(*cmp, "compare", "tube_lengths"), "compare.tube_lengths");
        for (std::size_t i = 0; i < cfg.tube_lengths.size(); ++i)
            if (!(cfg.tube_lengths[i] > 0.0))
                fail("compare.tube_lengths[" + std::to_string(i) + "]", "must be > 0");
    }

    if (const json* geom = optional_member(j, "config", "geometry")) {
        const std::string gp = "geometry";
        if (const json* a = optional_member(*geom, gp, "axial_samples")) {
            cfg.geometry.axial_samples = as_int(*a, gp + ".axial_samples");
            if (cfg.geometry.axial_samples < 2) fail(gp + ".axial_samples", "must be >= 2");
        }
        if (const json* b = optional_member(*geom, gp, "boundary_samples")) {
            cfg.geometry.boundary_samples = as_int(*b, gp + ".boundary_samples");
            if (cfg.geometry.boundary_samples < 1) fail(gp + ".boundary_samples", "must be >= 1");
        }
    }

    if (const json* out = optional_member(j, "config", "output"))
        if (const json* dir = optional_member(*out, "output", "directory"))
            cfg.output_dir = as_string(*dir, "output.directory");

    if (const json* seed = optional_member(j, "config", "seed")) {
        if (!seed->is_number_unsigned() && !seed->is_number_integer())
            fail("seed", "expected a non-negative integer");
        const long long v = seed->get<long long>();
        if (v < 0) fail("seed", "must be >= 0");
        cfg.seed = static_cast<std::uint64_t>(v);
    }
    if (const json* threads = optional_member(j, "config", "threads")) {
        const int t = as_int(*threads, "threads");
        if (t < 0) fail("threads", "must be >= 0 (0 = hardware)");
        cfg.threads = t;
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

}  // namespace twistbound
