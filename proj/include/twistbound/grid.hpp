#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>

#include "twistbound/cross_section.hpp"
#include "twistbound/twist_profile.hpp"
#include "twistbound/types.hpp"

namespace twistbound {

/// Uniform mesh over a truncated tube: axial window, mesh size h (same in all
/// three directions), and a transverse margin added around the swept annulus.
struct GridSpec {
    Interval x1_range;
    double h = 0.125;
    double padding = 0.25;
};

/// Throws ValidationError unless the axial extent is an integer multiple of h
/// with at least 4 cells and h > 0.
void validate(const GridSpec& spec);

/// Interior-node mask of the truncated twisted tube. Node lattice:
///   x1 = window.lo + i1 h   (i1 = 1 .. n1-1, strictly inside the window)
///   y  = -half_extent + i h (i  = 1 .. nt-1 per transverse direction)
/// A node is interior iff rotating its transverse coordinates by theta(x1)
/// lands strictly inside the cross-section. Boundary nodes are excluded, so
/// the masked domain under-approximates the tube.
struct GridMask {
    int n1 = 0;  // axial cells
    int nt = 0;  // transverse cells per direction
    double h = 0.0;
    Interval window;
    double half_extent = 0.0;

    std::vector<std::int32_t> index;                 // lattice -> equation or -1
    std::vector<std::array<std::int32_t, 3>> nodes;  // equation -> lattice (i1,i2,i3)

    int count() const { return static_cast<int>(nodes.size()); }

    int lattice_size() const { return (n1 - 1) * (nt - 1) * (nt - 1); }
    int flat(int i1, int i2, int i3) const {
        return ((i1 - 1) * (nt - 1) + (i2 - 1)) * (nt - 1) + (i3 - 1);
    }
    Vec3d position(int eq) const {
        const auto& n = nodes[static_cast<std::size_t>(eq)];
        return {window.lo + n[0] * h, -half_extent + n[1] * h, -half_extent + n[2] * h};
    }
};

/// Builds the mask. Throws ValidationError on a bad spec and NumericalError
/// when no interior node exists (window/box misses the tube).
GridMask build_mask(const TwistProfile& profile, const CrossSection& cs, const GridSpec& spec);

/// Symmetric sparse operator in compressed row layout.
using SparseOperator = Eigen::SparseMatrix<double, Eigen::RowMajor, std::int32_t>;

/// 7-point Dirichlet Laplacian on the masked nodes: diagonal 6/h^2,
/// off-diagonal -1/h^2 for lattice neighbors inside the mask.
SparseOperator assemble_laplacian(const GridMask& mask, double h);

/// Trilinear interpolation of coarse-grid vectors onto a fine mask whose
/// spacing halves the coarse one. Missing coarse neighbors lose their weight
/// (renormalized); fine nodes with no coarse support get zero.
Eigen::MatrixXd prolong(const GridMask& coarse, const GridMask& fine,
                        const Eigen::MatrixXd& coarse_vectors);

}  // namespace twistbound
