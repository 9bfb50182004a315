#include "twistbound/grid.hpp"

#include <cmath>

#include "twistbound/errors.hpp"

namespace twistbound {

namespace {

// Rounds x/h to an integer, requiring near-exact divisibility.
long exact_cells(double extent, double h, const char* what) {
    const double cells = extent / h;
    const long n = std::lround(cells);
    if (std::abs(cells - static_cast<double>(n)) > 1e-9 * std::max(1.0, std::abs(cells)))
        throw ValidationError(std::string("grid: ") + what + " must be an integer multiple of h");
    return n;
}

}  // namespace

void validate(const GridSpec& spec) {
    if (!(spec.h > 0.0)) throw ValidationError("grid: h must be > 0");
    if (spec.x1_range.empty()) throw ValidationError("grid: empty axial window");
    const long n1 = exact_cells(spec.x1_range.length(), spec.h, "axial extent");
    if (n1 < 4) throw ValidationError("grid: axial extent must span at least 4 cells");
}

GridMask build_mask(const TwistProfile& profile, const CrossSection& cs, const GridSpec& spec) {
    validate(spec);

    GridMask mask;
    mask.h = spec.h;
    mask.window = spec.x1_range;
    mask.n1 = static_cast<int>(exact_cells(spec.x1_range.length(), spec.h, "axial extent"));

    // Transverse half-extent: smallest grid-aligned box covering the swept
    // annulus plus padding. Padding may be negative for deliberately
    // undersized boxes, but the box must stay nonempty.
    const double wanted = cs.r_max() + spec.padding;
    if (!(wanted > 0.0)) throw ValidationError("grid: transverse box is empty");
    mask.half_extent = std::ceil(wanted / spec.h - 1e-12) * spec.h;
    mask.nt = static_cast<int>(exact_cells(2.0 * mask.half_extent, spec.h, "transverse extent"));
    if (mask.nt < 4) throw ValidationError("grid: transverse extent must span at least 4 cells");

    mask.index.assign(static_cast<std::size_t>(mask.lattice_size()), -1);

    for (int i1 = 1; i1 < mask.n1; ++i1) {
        const double x1 = spec.x1_range.lo + i1 * spec.h;
        const double angle = profile.theta(x1);
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        for (int i2 = 1; i2 < mask.nt; ++i2) {
            const double y2 = -mask.half_extent + i2 * spec.h;
            for (int i3 = 1; i3 < mask.nt; ++i3) {
                const double y3 = -mask.half_extent + i3 * spec.h;
                // Undo the tube's rotation: counter-clockwise by theta.
                const Vec2d in_section(c * y2 - s * y3, s * y2 + c * y3);
                if (!cs.contains(in_section)) continue;
                mask.index[static_cast<std::size_t>(mask.flat(i1, i2, i3))] =
                    static_cast<std::int32_t>(mask.nodes.size());
                mask.nodes.push_back({i1, i2, i3});
            }
        }
    }

    if (mask.nodes.empty())
        throw NumericalError("build_mask: no interior node (window/box misses the tube)");
    return mask;
}

SparseOperator assemble_laplacian(const GridMask& mask, double h) {
    if (mask.count() == 0) throw ValidationError("assemble_laplacian: empty mask");
    const double inv_h2 = 1.0 / (h * h);
    const int n = mask.count();

    std::vector<Eigen::Triplet<double, std::int32_t>> entries;
    entries.reserve(static_cast<std::size_t>(n) * 7);

    auto neighbor = [&](int i1, int i2, int i3) -> std::int32_t {
        if (i1 < 1 || i1 >= mask.n1 || i2 < 1 || i2 >= mask.nt || i3 < 1 || i3 >= mask.nt)
            return -1;
        return mask.index[static_cast<std::size_t>(mask.flat(i1, i2, i3))];
    };

    for (int row = 0; row < n; ++row) {
        const auto& node = mask.nodes[static_cast<std::size_t>(row)];
        entries.emplace_back(row, row, 6.0 * inv_h2);
        const int offsets[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                   {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
        for (const auto& d : offsets) {
            const std::int32_t col = neighbor(node[0] + d[0], node[1] + d[1], node[2] + d[2]);
            if (col >= 0) entries.emplace_back(row, col, -inv_h2);
        }
    }

    SparseOperator A(n, n);
    A.setFromTriplets(entries.begin(), entries.end());
    A.makeCompressed();
    return A;
}

Eigen::MatrixXd prolong(const GridMask& coarse, const GridMask& fine,
                        const Eigen::MatrixXd& coarse_vectors) {
    if (coarse_vectors.rows() != coarse.count())
        throw ValidationError("prolong: vector rows do not match the coarse mask");
    if (std::abs(coarse.h - 2.0 * fine.h) > 1e-12 * coarse.h)
        throw ValidationError("prolong: coarse spacing must be twice the fine spacing");

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(fine.count(), coarse_vectors.cols());

    auto coarse_eq = [&](int i1, int i2, int i3) -> std::int32_t {
        if (i1 < 1 || i1 >= coarse.n1 || i2 < 1 || i2 >= coarse.nt || i3 < 1 || i3 >= coarse.nt)
            return -1;
        return coarse.index[static_cast<std::size_t>(coarse.flat(i1, i2, i3))];
    };

    for (int eq = 0; eq < fine.count(); ++eq) {
        const Vec3d p = fine.position(eq);
        // Local coordinates in the coarse lattice.
        const double u1 = (p.x() - coarse.window.lo) / coarse.h;
        const double u2 = (p.y() + coarse.half_extent) / coarse.h;
        const double u3 = (p.z() + coarse.half_extent) / coarse.h;
        const int b1 = static_cast<int>(std::floor(u1 + 1e-12));
        const int b2 = static_cast<int>(std::floor(u2 + 1e-12));
        const int b3 = static_cast<int>(std::floor(u3 + 1e-12));
        const double f1 = u1 - b1, f2 = u2 - b2, f3 = u3 - b3;

        double weight_sum = 0.0;
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(coarse_vectors.cols());
        for (int d1 = 0; d1 <= 1; ++d1) {
            for (int d2 = 0; d2 <= 1; ++d2) {
                for (int d3 = 0; d3 <= 1; ++d3) {
                    const double w = (d1 ? f1 : 1.0 - f1) * (d2 ? f2 : 1.0 - f2) *
                                     (d3 ? f3 : 1.0 - f3);
                    if (w <= 0.0) continue;
                    const std::int32_t ceq = coarse_eq(b1 + d1, b2 + d2, b3 + d3);
                    if (ceq < 0) continue;
                    acc += w * coarse_vectors.row(ceq);
                    weight_sum += w;
                }
            }
        }
        if (weight_sum > 0.0) out.row(eq) = acc / weight_sum;
    }
    return out;
}

}  // namespace twistbound
