// Command-line front end: configuration-driven bound evaluation, sweeps,
// slice reports, eigensolver runs, and verification.
//
// Exit status: 0 success, 1 validation error, 2 numerical failure,
// 3 verification failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twistbound/config.hpp"
#include "twistbound/eigensolver.hpp"
#include "twistbound/errors.hpp"
#include "twistbound/io.hpp"
#include "twistbound/parallel.hpp"
#include "twistbound/slice_geometry.hpp"
#include "twistbound/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace twistbound;

namespace {

struct Context {
    RunConfig cfg;
    fs::path out_dir;
};

json artifact_header(const Context& ctx, const std::string& command) {
    json j;
    j["version"] = kVersion;
    j["config_hash"] = ctx.cfg.config_hash;
    j["command"] = command;
    return j;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericalError("cannot write " + path.string());
    out << text;
}

void write_json(const Context& ctx, const std::string& name, const json& j) {
    write_text(ctx.out_dir / name, j.dump(2) + "\n");
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    row += '\n';
    return row;
}

std::string num(double v) { return io::format_real(v); }

json support_json(const BoundResult& r) {
    return json{{"minus", {r.support_minus.lo, r.support_minus.hi}},
                {"plus", {r.support_plus.lo, r.support_plus.hi}}};
}

double resolved_epsilon(const Context& ctx, double sigma, double lambda) {
    if (ctx.cfg.epsilon) return *ctx.cfg.epsilon;
    return optimize_epsilon(ctx.cfg.require_profile(), ctx.cfg.require_cross_section(), sigma,
                            lambda, ctx.cfg.variant, ctx.cfg.policy)
        .epsilon_star;
}

Interval resolve_window(const Context& ctx) {
    if (ctx.cfg.grids.window) return *ctx.cfg.grids.window;
    if (ctx.cfg.sigmas.empty() || ctx.cfg.lambdas.empty())
        throw ValidationError("grids.window: \"auto\" needs a bound section");
    Interval w{0.0, 0.0};
    bool first = true;
    for (double sigma : ctx.cfg.sigmas) {
        for (double lambda : ctx.cfg.lambdas) {
            const double eps = resolved_epsilon(ctx, sigma, lambda);
            const Interval s =
                suggest_window(ctx.cfg.require_profile(), ctx.cfg.variant, lambda, eps);
            if (first) {
                w = s;
                first = false;
            } else {
                w.lo = std::min(w.lo, s.lo);
                w.hi = std::max(w.hi, s.hi);
            }
        }
    }
    return w;
}

std::vector<GridSpec> resolve_grids(const Context& ctx) {
    if (ctx.cfg.grids.h_values.empty())
        throw ValidationError("grids.h: missing (this command needs grids)");
    const Interval window = resolve_window(ctx);
    std::vector<GridSpec> specs;
    for (double h : ctx.cfg.grids.h_values) {
        GridSpec s{window, h, ctx.cfg.grids.padding};
        validate(s);
        specs.push_back(s);
    }
    return specs;
}

// ---------------------------------------------------------------------------

int cmd_bound(const Context& ctx) {
    const auto queries = ctx.cfg.bound_queries();
    if (queries.empty()) throw ValidationError("bound: missing sigma/lambda lists");

    std::string csv = csv_row({"sigma", "lambda", "epsilon_used", "integral", "rhs"});
    json records = json::array();
    for (const BoundQuery& q : queries) {
        const BoundResult r =
            berezin_rhs(ctx.cfg.require_profile(), ctx.cfg.require_cross_section(), q);
        csv += csv_row({num(q.sigma), num(q.lambda), num(r.epsilon_used), num(r.integral_value),
                        num(r.rhs)});
        records.push_back(json{{"sigma", q.sigma},
                               {"lambda", q.lambda},
                               {"epsilon_used", r.epsilon_used},
                               {"variant", to_string(q.variant)},
                               {"rhs", r.rhs},
                               {"integral_value", r.integral_value},
                               {"support", support_json(r)},
                               {"constants",
                                {{"L_sigma", r.l_sigma}, {"K1", nullptr}, {"K2", nullptr}}}});
    }
    write_text(ctx.out_dir / "bound.csv", csv);
    json doc = artifact_header(ctx, "bound");
    doc["records"] = records;
    write_json(ctx, "bound.json", doc);
    return 0;
}

int cmd_asymptotics(const Context& ctx) {
    const auto queries = ctx.cfg.bound_queries();
    if (queries.empty()) throw ValidationError("bound: missing sigma/lambda lists");

    std::string csv = csv_row({"sigma", "lambda", "rhs", "asymptotic_rhs", "ratio"});
    json records = json::array();
    for (const BoundQuery& q : queries) {
        const auto& profile = ctx.cfg.require_profile();
        const auto& cs = ctx.cfg.require_cross_section();
        const BoundResult r = berezin_rhs(profile, cs, q);
        BoundQuery fixed = q;
        fixed.epsilon = r.epsilon_used;
        const AsymptoticResult a = asymptotic_rhs(profile, cs, fixed);
        const double ratio = a.value > 0.0 ? r.rhs / a.value : 0.0;
        csv += csv_row({num(q.sigma), num(q.lambda), num(r.rhs), num(a.value), num(ratio)});
        records.push_back(json{{"sigma", q.sigma},
                               {"lambda", q.lambda},
                               {"epsilon_used", r.epsilon_used},
                               {"variant", to_string(q.variant)},
                               {"rhs", r.rhs},
                               {"integral_value", r.integral_value},
                               {"support", support_json(r)},
                               {"asymptotic_rhs", a.value},
                               {"ratio", ratio},
                               {"constants",
                                {{"L_sigma", r.l_sigma}, {"K1", a.k1}, {"K2", a.k2}}}});
    }
    write_text(ctx.out_dir / "asymptotics.csv", csv);
    json doc = artifact_header(ctx, "asymptotics");
    doc["records"] = records;
    write_json(ctx, "asymptotics.json", doc);
    return 0;
}

int cmd_compare(const Context& ctx) {
    const auto queries = ctx.cfg.bound_queries();
    if (queries.empty()) throw ValidationError("bound: missing sigma/lambda lists");
    if (ctx.cfg.tube_lengths.empty()) throw ValidationError("compare.tube_lengths: missing");

    std::string csv =
        csv_row({"lambda", "rhs", "asymptotic_rhs", "ratio", "classical_berezin", "tube_length",
                 "sigma"});
    json records = json::array();
    for (const BoundQuery& q : queries) {
        const auto& profile = ctx.cfg.require_profile();
        const auto& cs = ctx.cfg.require_cross_section();
        const BoundResult r = berezin_rhs(profile, cs, q);
        BoundQuery fixed = q;
        fixed.epsilon = r.epsilon_used;
        const AsymptoticResult a = asymptotic_rhs(profile, cs, fixed);
        const double ratio = a.value > 0.0 ? r.rhs / a.value : 0.0;
        for (double n : ctx.cfg.tube_lengths) {
            const double classical = classical_berezin(cs, n, q.sigma, q.lambda, ctx.cfg.policy);
            csv += csv_row({num(q.lambda), num(r.rhs), num(a.value), num(ratio), num(classical),
                            num(n), num(q.sigma)});
            records.push_back(json{{"sigma", q.sigma},
                                   {"lambda", q.lambda},
                                   {"tube_length", n},
                                   {"rhs", r.rhs},
                                   {"asymptotic_rhs", a.value},
                                   {"ratio", ratio},
                                   {"classical_berezin", classical},
                                   {"twisted_bound_wins", r.rhs < classical}});
        }
    }
    write_text(ctx.out_dir / "compare.csv", csv);
    json doc = artifact_header(ctx, "compare");
    doc["records"] = records;
    write_json(ctx, "compare.json", doc);
    return 0;
}

int cmd_slices(const Context& ctx) {
    const auto& profile = ctx.cfg.require_profile();
    const auto& cs = ctx.cfg.require_cross_section();

    std::vector<Vec2d> points = ctx.cfg.slices.points;
    if (ctx.cfg.slices.sample_count > 0) {
        std::mt19937_64 rng(ctx.cfg.seed);
        std::uniform_real_distribution<double> unit(0.05, 0.95);
        std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
        for (int i = 0; i < ctx.cfg.slices.sample_count; ++i) {
            const double r = cs.r_min() + unit(rng) * (cs.r_max() - cs.r_min());
            const double phi = angle(rng);
            points.emplace_back(r * std::cos(phi), r * std::sin(phi));
        }
    }
    if (points.empty()) throw ValidationError("slices.points: no transversal points given");

    Interval window;
    if (ctx.cfg.slices.window) {
        window = *ctx.cfg.slices.window;
    } else {
        // Wide enough for several rotation periods.
        const double w =
            profile.branch_inverse(Branch::Plus, profile.theta0() + 8.0 * std::numbers::pi) + 0.5;
        window = {-w, w};
    }

    struct Row {
        SliceIntervals si;
        SliceLawReport report;
    };
    std::vector<Row> rows(points.size());
    parallel_for(0, static_cast<int>(points.size()), [&](int i) {
        rows[static_cast<std::size_t>(i)].si =
            slice_intervals(profile, cs, points[static_cast<std::size_t>(i)], window);
        rows[static_cast<std::size_t>(i)].report =
            check_slice_laws(rows[static_cast<std::size_t>(i)].si, profile);
    });

    std::string csv = csv_row({"y2", "y3", "k", "a_k", "b_k", "delta_in", "delta_gap"});
    json records = json::array();
    bool all_ok = true;
    for (std::size_t p = 0; p < rows.size(); ++p) {
        const auto& si = rows[p].si;
        const auto& report = rows[p].report;
        all_ok = all_ok && report.all_ok();
        for (std::size_t k = 0; k < si.intervals.size(); ++k) {
            std::string delta_in, delta_gap;
            for (const auto& e : report.rotations)
                if (e.index == static_cast<int>(k)) delta_in = num(e.delta);
            for (const auto& e : report.gaps)
                if (e.index == static_cast<int>(k)) delta_gap = num(e.delta);
            csv += csv_row({num(si.y.x()), num(si.y.y()), std::to_string(k),
                            num(si.intervals[k].a), num(si.intervals[k].b), delta_in, delta_gap});
        }
        json jrows = json::array();
        for (const auto& iv : si.intervals)
            jrows.push_back(json{{"a", iv.a}, {"b", iv.b}, {"partial", iv.partial()}});
        records.push_back(json{{"y", {si.y.x(), si.y.y()}},
                               {"window", {window.lo, window.hi}},
                               {"intervals", jrows},
                               {"laws_ok", report.all_ok()}});
    }
    write_text(ctx.out_dir / "slices.csv", csv);
    json doc = artifact_header(ctx, "slices");
    doc["records"] = records;
    doc["all_laws_ok"] = all_ok;
    write_json(ctx, "slices.json", doc);
    return 0;
}

void export_mask(const Context& ctx, const GridMask& mask) {
    std::string bytes(static_cast<std::size_t>(mask.lattice_size()), '\0');
    for (std::size_t i = 0; i < bytes.size(); ++i)
        if (mask.index[i] >= 0) bytes[i] = '\1';
    write_text(ctx.out_dir / "mask.bin", bytes);

    json header = artifact_header(ctx, "mask");
    header["dims"] = {mask.n1 - 1, mask.nt - 1, mask.nt - 1};
    header["h"] = mask.h;
    header["window"] = {mask.window.lo, mask.window.hi};
    header["half_extent"] = mask.half_extent;
    header["interior_count"] = mask.count();
    header["layout"] = "byte per lattice node, axial index slowest";
    write_json(ctx, "mask.json", header);
}

int cmd_spectrum(const Context& ctx) {
    if (ctx.cfg.lambdas.empty()) throw ValidationError("bound.lambda: missing (spectrum cutoff)");
    const double cutoff = *std::max_element(ctx.cfg.lambdas.begin(), ctx.cfg.lambdas.end());
    if (!(cutoff > 0.0)) throw ValidationError("bound.lambda: spectrum needs a positive cutoff");

    const auto specs = resolve_grids(ctx);
    const GridSpec finest = specs.back();
    const auto& profile = ctx.cfg.require_profile();
    const auto& cs = ctx.cfg.require_cross_section();

    const GridMask mask = build_mask(profile, cs, finest);
    const SparseOperator a = assemble_laplacian(mask, finest.h);
    const SpectrumResult r = lowest_eigenvalues(a, cutoff);

    std::string csv = csv_row({"index", "lambda", "residual"});
    json evs = json::array();
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        csv += csv_row({std::to_string(i + 1), num(r.eigenvalues[i]), num(r.residuals[i])});
        evs.push_back(r.eigenvalues[i]);
    }
    write_text(ctx.out_dir / "spectrum.csv", csv);

    json doc = artifact_header(ctx, "spectrum");
    doc["cutoff"] = cutoff;
    doc["grid"] = {{"window", {finest.x1_range.lo, finest.x1_range.hi}},
                   {"h", finest.h},
                   {"padding", finest.padding},
                   {"interior_nodes", mask.count()}};
    doc["eigenvalues"] = evs;
    doc["iterations"] = r.iterations;
    doc["inertia_checked"] = r.inertia_checked;
    write_json(ctx, "spectrum.json", doc);

    export_mask(ctx, mask);
    return 0;
}

int cmd_verify(const Context& ctx) {
    const auto queries = ctx.cfg.bound_queries();
    if (queries.empty()) throw ValidationError("bound: missing sigma/lambda lists");
    const auto specs = resolve_grids(ctx);
    if (specs.size() < 2) throw ValidationError("grids.h: verification needs at least two grids");

    const auto reports = verify_bound_sweep(ctx.cfg.require_profile(),
                                            ctx.cfg.require_cross_section(), specs, queries);

    bool all_pass = true;
    std::string csv = csv_row(
        {"sigma", "lambda", "epsilon_used", "lhs_extrapolated", "rhs", "margin", "pass"});
    json jreports = json::array();
    for (const auto& rep : reports) {
        all_pass = all_pass && rep.pass;
        csv += csv_row({num(rep.query.sigma), num(rep.query.lambda), num(rep.epsilon_used),
                        num(rep.lhs_extrapolated), num(rep.rhs), num(rep.margin),
                        rep.pass ? "1" : "0"});
        json grids = json::array();
        for (const auto& g : rep.grids)
            grids.push_back(json{{"h", g.spec.h},
                                 {"interior_nodes", g.interior_nodes},
                                 {"eigenvalues_below_lambda",
                                  eigenvalue_moment(std::span<const double>(g.eigenvalues),
                                                    rep.query.lambda, 0.0)},
                                 {"moment", g.moment}});
        jreports.push_back(json{{"sigma", rep.query.sigma},
                                {"lambda", rep.query.lambda},
                                {"variant", to_string(rep.query.variant)},
                                {"epsilon_used", rep.epsilon_used},
                                {"grids", grids},
                                {"lhs_extrapolated", rep.lhs_extrapolated},
                                {"rhs", rep.rhs},
                                {"margin", rep.margin},
                                {"pass", rep.pass}});
    }
    write_text(ctx.out_dir / "verify.csv", csv);
    json doc = artifact_header(ctx, "verify");
    doc["window"] = {specs.front().x1_range.lo, specs.front().x1_range.hi};
    doc["reports"] = jreports;
    doc["all_pass"] = all_pass;
    write_json(ctx, "verify.json", doc);

    if (!all_pass) {
        std::cerr << "verification failed: extrapolated moment exceeds the bound\n";
        return 3;
    }
    return 0;
}

int cmd_geometry(const Context& ctx) {
    const auto& profile = ctx.cfg.require_profile();
    const auto& cs = ctx.cfg.require_cross_section();

    Interval window;
    if (ctx.cfg.grids.window)
        window = *ctx.cfg.grids.window;
    else if (ctx.cfg.slices.window)
        window = *ctx.cfg.slices.window;
    else
        window = {-4.0, 4.0};

    // Boundary points at equal arc-length steps along the polygon perimeter.
    const auto& verts = cs.vertices();
    double perimeter = 0.0;
    for (std::size_t i = 0; i < verts.size(); ++i)
        perimeter += (verts[(i + 1) % verts.size()] - verts[i]).norm();

    std::vector<Vec2d> boundary;
    const int nb = ctx.cfg.geometry.boundary_samples;
    for (int k = 0; k < nb; ++k) {
        double target = perimeter * k / nb;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            const Vec2d e = verts[(i + 1) % verts.size()] - verts[i];
            const double len = e.norm();
            if (target <= len || i + 1 == verts.size()) {
                boundary.push_back(verts[i] + (len > 0 ? std::min(target / len, 1.0) : 0.0) * e);
                break;
            }
            target -= len;
        }
    }

    std::string csv = csv_row({"x1", "y2", "y3"});
    const int na = ctx.cfg.geometry.axial_samples;
    for (int i = 0; i < na; ++i) {
        const double x1 = window.lo + window.length() * i / (na - 1);
        const double angle = profile.theta(x1);
        const double c = std::cos(angle), s = std::sin(angle);
        for (const Vec2d& p : boundary) {
            // Tube map: the section point rotates clockwise by theta.
            const double y2 = p.x() * c + p.y() * s;
            const double y3 = p.y() * c - p.x() * s;
            csv += csv_row({num(x1), num(y2), num(y3)});
        }
    }
    write_text(ctx.out_dir / "geometry.csv", csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenvalue-moment bounds on twisted tubes"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    int threads = -1;
    long long seed = -1;

    app.add_option("--config", config_path, "Run configuration file (JSON)")->required();
    app.add_option("--out", out_dir, "Output directory (default: config output.directory)");
    app.add_option("--threads", threads, "Worker threads (0 = hardware)");
    app.add_option("--seed", seed, "Random seed override");

    const std::vector<std::pair<std::string, int (*)(const Context&)>> commands = {
        {"bound", cmd_bound},       {"asymptotics", cmd_asymptotics},
        {"compare", cmd_compare},   {"slices", cmd_slices},
        {"spectrum", cmd_spectrum}, {"verify", cmd_verify},
        {"geometry", cmd_geometry}};

    for (const auto& c : commands) app.add_subcommand(c.first);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        Context ctx{load_config(config_path), {}};

        if (seed >= 0) ctx.cfg.seed = static_cast<std::uint64_t>(seed);
        if (threads >= 0) ctx.cfg.threads = threads;
        if (const char* env = std::getenv("TWISTBOUND_THREADS")) {
            ctx.cfg.threads = std::max(0, std::atoi(env));
        }
        set_thread_count(ctx.cfg.threads);

        ctx.out_dir = out_dir.empty() ? fs::path(ctx.cfg.output_dir) : fs::path(out_dir);
        std::error_code ec;
        fs::create_directories(ctx.out_dir, ec);

        for (const auto& c : commands)
            if (app.get_subcommand(c.first)->parsed()) return c.second(ctx);
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
