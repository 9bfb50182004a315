#include "twistbound/eigensolver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "twistbound/errors.hpp"
#include "twistbound/root_finding.hpp"

namespace twistbound {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SpCol = Eigen::SparseMatrix<double>;

SpCol to_col_major(const SparseOperator& a) {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(a.nonZeros()));
    for (int row = 0; row < a.outerSize(); ++row)
        for (SparseOperator::InnerIterator it(a, row); it; ++it)
            entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                 it.value());
    SpCol out(a.rows(), a.cols());
    out.setFromTriplets(entries.begin(), entries.end());
    out.makeCompressed();
    return out;
}

/// Column count of eigenvalues strictly below the cutoff via LDLT inertia
/// (Sylvester's law); nullopt when the pivot-free factorization breaks down.
std::optional<int> inertia_below(const SpCol& a, double shift) {
    SpCol ident(a.rows(), a.cols());
    ident.setIdentity();
    SpCol shifted = a - shift * ident;
    Eigen::SimplicialLDLT<SpCol> ldlt;
    ldlt.compute(shifted);
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    const auto d = ldlt.vectorD();
    int count = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!std::isfinite(d(i)) || d(i) == 0.0) return std::nullopt;
        if (d(i) < 0.0) ++count;
    }
    return count;
}

struct Preconditioner {
    Eigen::IncompleteCholesky<double, Eigen::Lower, Eigen::AMDOrdering<int>> ic;
    Vector inv_diag;
    bool use_ic = false;

    void init(const SpCol& a) {
        ic.compute(a);
        if (ic.info() == Eigen::Success) {
            use_ic = true;
            return;
        }
        inv_diag = a.diagonal().cwiseInverse();
    }
    Matrix apply(const Matrix& r) const {
        if (use_ic) return ic.solve(r);
        return inv_diag.asDiagonal() * r;
    }
};

// Rescales columns to unit norm, dropping near-null ones, so that columns of
// very different magnitudes (converged vs. active residuals) survive the
// rank truncation below on equal footing.
Matrix normalized_columns(Matrix m) {
    if (m.cols() == 0) return m;
    double max_norm = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) max_norm = std::max(max_norm, m.col(j).norm());
    if (max_norm == 0.0) return Matrix(m.rows(), 0);
    Matrix out(m.rows(), m.cols());
    Eigen::Index kept = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double norm = m.col(j).norm();
        if (norm <= 1e-13 * max_norm) continue;
        out.col(kept++) = m.col(j) / norm;
    }
    return out.leftCols(kept);
}

// Orthonormalizes m against the given orthonormal bases (two projection
// passes), then internally via SVD with rank truncation.
Matrix orthonormalize(Matrix m, std::initializer_list<const Matrix*> against) {
    if (m.cols() == 0) return m;
    for (int pass = 0; pass < 2; ++pass)
        for (const Matrix* q : against)
            if (q->cols() > 0) m.noalias() -= (*q) * (q->transpose() * m);
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(0) > 0.0)) return Matrix(m.rows(), 0);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > 1e-10 * sv(0)) ++rank;
    return svd.matrixU().leftCols(rank);
}

SpectrumResult gather(const SparseOperator& a, const Vector& theta, const Matrix& x, int below,
                      double cutoff) {
    SpectrumResult out;
    out.cutoff = cutoff;
    out.vectors = x.leftCols(below);
    out.eigenvalues.resize(static_cast<std::size_t>(below));
    out.residuals.resize(static_cast<std::size_t>(below));
    for (int i = 0; i < below; ++i) {
        out.eigenvalues[static_cast<std::size_t>(i)] = theta(i);
        const Vector r = a * out.vectors.col(i) - theta(i) * out.vectors.col(i);
        out.residuals[static_cast<std::size_t>(i)] =
            r.norm() / std::max(std::abs(theta(i)), 1e-300);
    }
    return out;
}

SpectrumResult dense_solve(const SparseOperator& a, double cutoff) {
    const Matrix dense = Matrix(a);
    Eigen::SelfAdjointEigenSolver<Matrix> es(dense);
    int below = 0;
    while (below < dense.rows() && es.eigenvalues()(below) < cutoff) ++below;
    SpectrumResult out = gather(a, es.eigenvalues(), es.eigenvectors(), below, cutoff);
    out.inertia_checked = true;
    out.inertia_count = below;
    out.iterations = 0;
    return out;
}

SpectrumResult lobpcg_solve(const SparseOperator& a, double cutoff, const EigenOptions& opt) {
    const int n = static_cast<int>(a.rows());
    const SpCol acol = to_col_major(a);

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_block = [&](int k) {
        Matrix g(n, k);
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < n; ++i) g(i, j) = gauss(rng);
        return g;
    };

    int m = opt.initial_block;
    Matrix X(n, 0);
    if (opt.initial_guess && opt.initial_guess->rows() == n && opt.initial_guess->cols() > 0) {
        X = *opt.initial_guess;
        m = std::max(m, static_cast<int>(X.cols()) + 4);
    }
    m = std::min({m, opt.max_block, std::max(1, n / 3)});
    if (static_cast<int>(X.cols()) > m) X = X.leftCols(m).eval();
    if (static_cast<int>(X.cols()) < m) {
        Matrix padded(n, m);
        padded << X, random_block(m - static_cast<int>(X.cols()));
        X = std::move(padded);
    }
    X = orthonormalize(std::move(X), {});
    m = static_cast<int>(X.cols());

    Preconditioner prec;
    prec.init(acol);

    // Converged eigenpairs below the cutoff are locked (hard deflation) so
    // their still-active near-degenerate partners converge independently;
    // without deflation the Ritz rotation inside a discrete cluster keeps
    // reshuffling its members and their residuals stall near the splitting.
    Matrix locked(n, 0);
    std::vector<double> locked_theta;
    Matrix P(n, 0);

    int grow_events = 0;
    SpectrumResult partial;
    partial.cutoff = cutoff;

    auto append_columns = [&](Matrix& dst, const Matrix& extra) {
        Matrix joined(n, dst.cols() + extra.cols());
        joined << dst, extra;
        dst = std::move(joined);
    };

    auto grow = [&](int add, const char* why) {
        add = std::min(add, opt.max_block - m - static_cast<int>(locked.cols()));
        if (add <= 0 || ++grow_events > 12) {
            throw EigensolverFailure(std::string("lowest_eigenvalues: cannot grow block (") +
                                         why + ")",
                                     std::move(partial));
        }
        Matrix fresh = orthonormalize(random_block(add), {&locked, &X, &P});
        if (fresh.cols() == 0) throw EigensolverFailure("lowest_eigenvalues: degenerate growth",
                                                        std::move(partial));
        append_columns(X, fresh);
        m = static_cast<int>(X.cols());
    };

    for (int iter = 1; iter <= opt.max_iterations; ++iter) {
        // Rayleigh-Ritz in span(X) with X kept off the locked space. AX is
        // recomputed each sweep so rounding never accumulates.
        X = orthonormalize(std::move(X), {&locked});
        m = static_cast<int>(X.cols());
        if (m == 0) {
            grow(6, "empty active block");
            continue;
        }
        Matrix AX = a * X;
        Matrix H = X.transpose() * AX;
        H = 0.5 * (H + H.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> hes(H);
        const Vector theta = hes.eigenvalues();
        X = X * hes.eigenvectors();
        AX = AX * hes.eigenvectors();

        Matrix R = AX - X * theta.asDiagonal();
        Vector res(m);
        for (int i = 0; i < m; ++i)
            res(i) = R.col(i).norm() / std::max(std::abs(theta(i)), 1e-300);

        int below = 0;  // active Ritz values under the cutoff
        while (below < m && theta(below) < cutoff) ++below;

        // Failure diagnostics snapshot: locked plus active-below pairs.
        partial.eigenvalues = locked_theta;
        partial.residuals.assign(locked_theta.size(), 0.0);
        for (int i = 0; i < below; ++i) {
            partial.eigenvalues.push_back(theta(i));
            partial.residuals.push_back(res(i));
        }
        partial.iterations = iter;

        // Lock the converged ascending prefix that sits below the cutoff.
        int lockable = 0;
        while (lockable < below && res(lockable) <= opt.tol) ++lockable;
        if (lockable > 0) {
            append_columns(locked, X.leftCols(lockable));
            for (int i = 0; i < lockable; ++i) locked_theta.push_back(theta(i));
            X = X.rightCols(m - lockable).eval();
            m = static_cast<int>(X.cols());
            // Routine top-up, not counted against the growth budget.
            const int add = std::min(6 - m, opt.max_block - m - static_cast<int>(locked.cols()));
            if (add > 0) {
                const Matrix fresh = orthonormalize(random_block(add), {&locked, &X, &P});
                if (fresh.cols() > 0) {
                    append_columns(X, fresh);
                    m = static_cast<int>(X.cols());
                }
            }
            continue;
        }

        if (below == 0) {
            // Everything under the cutoff is locked; the lowest active pair
            // certifies that nothing else remains below.
            if (res(0) <= opt.tol) {
                const int count = static_cast<int>(locked_theta.size());
                std::optional<int> certified;
                if (n <= opt.inertia_dim_limit) certified = inertia_below(acol, cutoff);
                if (!certified || *certified == count) {
                    // Locked batches within a near-degenerate cluster can
                    // interleave by the splitting; sort before reporting.
                    std::vector<int> order(static_cast<std::size_t>(count));
                    for (int i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = i;
                    std::sort(order.begin(), order.end(), [&](int u, int v) {
                        return locked_theta[static_cast<std::size_t>(u)] <
                               locked_theta[static_cast<std::size_t>(v)];
                    });
                    Vector all_theta(count);
                    Matrix sorted(n, count);
                    for (int i = 0; i < count; ++i) {
                        all_theta(i) = locked_theta[static_cast<std::size_t>(order[i])];
                        sorted.col(i) = locked.col(order[i]);
                    }
                    SpectrumResult out = gather(a, all_theta, sorted, count, cutoff);
                    out.iterations = iter;
                    out.inertia_checked = certified.has_value();
                    out.inertia_count = certified.value_or(-1);
                    bool honest = true;
                    for (double r : out.residuals) honest = honest && r <= opt.tol;
                    if (honest) return out;
                    throw EigensolverFailure(
                        "lowest_eigenvalues: locked pair residual regressed", std::move(out));
                }
                if (*certified < count)
                    throw EigensolverFailure(
                        "lowest_eigenvalues: inertia reports fewer eigenvalues than converged",
                        std::move(partial));
                grow(*certified - count + 4, "inertia mismatch");
                continue;
            }
        } else if (below == m) {
            grow(std::max(4, m / 2), "whole active block below cutoff");
            continue;
        }

        // Preconditioned residuals of the still-moving sought columns,
        // everything up to and including the guard position.
        std::vector<int> active;
        for (int i = 0; i <= below && i < m; ++i)
            if (res(i) > opt.tol) active.push_back(i);
        if (active.empty()) active.push_back(std::min(below, m - 1));

        Matrix Ract(n, static_cast<int>(active.size()));
        for (std::size_t j = 0; j < active.size(); ++j)
            Ract.col(static_cast<int>(j)) = R.col(active[j]);

        // P carries the previous step direction and is not orthogonal to the
        // freshly rotated X; restore pairwise orthonormality before any block
        // is used as a projector.
        P = orthonormalize(std::move(P), {&locked, &X});
        Matrix W = orthonormalize(normalized_columns(prec.apply(Ract)), {&locked, &X, &P});
        const int wc = static_cast<int>(W.cols());
        const int pc = static_cast<int>(P.cols());
        if (wc + pc == 0) {
            grow(4, "stagnated basis");
            continue;
        }

        Matrix S(n, m + wc + pc);
        S << X, W, P;
        Matrix AS(n, m + wc + pc);
        AS << AX, a * W, a * P;

        Matrix T = S.transpose() * AS;
        T = 0.5 * (T + T.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> tes(T);
        const Matrix Y = tes.eigenvectors().leftCols(m);

        Matrix Xnew = S * Y;
        // Step directions for the still-active pairs only; converged pairs
        // would contribute normalized rounding noise.
        Matrix Pnew(n, 0);
        if (!active.empty()) {
            Matrix Ywp(wc + pc, static_cast<int>(active.size()));
            for (std::size_t j = 0; j < active.size(); ++j)
                Ywp.col(static_cast<int>(j)) = Y.bottomRows(wc + pc).col(active[j]);
            Pnew = orthonormalize(normalized_columns(S.rightCols(wc + pc) * Ywp), {});
        }
        X = std::move(Xnew);
        P = std::move(Pnew);
    }

    throw EigensolverFailure("lowest_eigenvalues: iteration budget exhausted",
                             std::move(partial));
}

}  // namespace

SpectrumResult lowest_eigenvalues(const SparseOperator& op, double cutoff,
                                  const EigenOptions& opt) {
    if (op.rows() != op.cols()) throw ValidationError("lowest_eigenvalues: operator not square");
    if (op.rows() == 0) throw ValidationError("lowest_eigenvalues: empty operator");
    if (!(cutoff > 0.0)) throw ValidationError("lowest_eigenvalues: cutoff must be > 0");
    if (op.rows() <= opt.dense_dim_limit) return dense_solve(op, cutoff);
    return lobpcg_solve(op, cutoff, opt);
}

Spectrum solve_spectrum(const TwistProfile& profile, const CrossSection& cs,
                        const GridSpec& spec, double cutoff, const EigenOptions& opt) {
    const GridMask mask = build_mask(profile, cs, spec);
    const SparseOperator a = assemble_laplacian(mask, spec.h);
    const SpectrumResult r = lowest_eigenvalues(a, cutoff, opt);
    return {r.eigenvalues, r.residuals, cutoff, spec};
}

double eigenvalue_moment(std::span<const double> eigenvalues, double lambda, double sigma) {
    if (!(sigma >= 0.0)) throw ValidationError("moment: sigma must be >= 0");
    if (!(lambda >= 0.0)) throw ValidationError("moment: lambda must be >= 0");
    double sum = 0.0;
    for (double ev : eigenvalues) {
        if (sigma == 0.0) {
            if (ev <= lambda) sum += 1.0;  // counting convention 0^0 = 1
        } else {
            const double deficit = lambda - ev;
            if (deficit > 0.0) sum += std::pow(deficit, sigma);
        }
    }
    return sum;
}

double eigenvalue_moment(const Spectrum& spectrum, double lambda, double sigma) {
    if (spectrum.cutoff < lambda)
        throw ValidationError("moment: spectrum incomplete below lambda (cutoff < lambda)");
    return eigenvalue_moment(std::span<const double>(spectrum.eigenvalues), lambda, sigma);
}

bool bound_satisfied(double lhs, double rhs, double tolerance) {
    if (rhs <= 0.0) return lhs <= 1e-12;
    return lhs <= rhs * (1.0 + tolerance);
}

namespace {

void validate_refinement(std::span<const GridSpec> specs) {
    if (specs.size() < 2)
        throw ValidationError("verify_bound: need at least two grids for extrapolation");
    for (const GridSpec& s : specs) validate(s);
    for (std::size_t i = 1; i < specs.size(); ++i) {
        const GridSpec& c = specs[i - 1];
        const GridSpec& f = specs[i];
        if (std::abs(c.x1_range.lo - f.x1_range.lo) > 1e-12 ||
            std::abs(c.x1_range.hi - f.x1_range.hi) > 1e-12 ||
            std::abs(c.padding - f.padding) > 1e-12)
            throw ValidationError("verify_bound: grids must share window and padding");
        if (std::abs(f.h - 0.5 * c.h) > 1e-9 * c.h)
            throw ValidationError("verify_bound: grid sequence must halve h");
    }
}

}  // namespace

std::vector<VerificationReport> verify_bound_sweep(const TwistProfile& profile,
                                                   const CrossSection& cs,
                                                   std::span<const GridSpec> specs,
                                                   std::span<const BoundQuery> queries,
                                                   const EigenOptions& opt) {
    validate_refinement(specs);
    if (queries.empty()) return {};
    double cutoff = 0.0;
    for (const BoundQuery& q : queries) {
        validate(q);
        cutoff = std::max(cutoff, q.lambda);
    }

    struct GridData {
        GridSpec spec;
        int nodes = 0;
        std::vector<double> eigenvalues;
    };
    std::vector<GridData> solved;
    GridMask prev_mask;
    Matrix prev_vectors;
    bool have_prev = false;

    for (const GridSpec& spec : specs) {
        GridMask mask = build_mask(profile, cs, spec);
        GridData data;
        data.spec = spec;
        data.nodes = mask.count();
        if (cutoff > 0.0) {
            const SparseOperator a = assemble_laplacian(mask, spec.h);
            EigenOptions local = opt;
            Matrix guess;
            if (have_prev) {
                guess = prolong(prev_mask, mask, prev_vectors);
                local.initial_guess = &guess;
            }
            SpectrumResult r = lowest_eigenvalues(a, cutoff, local);
            data.eigenvalues = r.eigenvalues;
            prev_vectors = std::move(r.vectors);
            prev_mask = std::move(mask);
            have_prev = true;
        }
        solved.push_back(std::move(data));
    }

    std::vector<VerificationReport> reports;
    reports.reserve(queries.size());
    for (const BoundQuery& q : queries) {
        VerificationReport rep;
        rep.query = q;
        for (const GridData& g : solved) {
            VerificationGridResult vg;
            vg.spec = g.spec;
            vg.interior_nodes = g.nodes;
            vg.eigenvalues = g.eigenvalues;
            vg.moment = eigenvalue_moment(std::span<const double>(g.eigenvalues), q.lambda,
                                          q.sigma);
            rep.grids.push_back(std::move(vg));
        }
        const double m_coarse = rep.grids[rep.grids.size() - 2].moment;
        const double m_fine = rep.grids.back().moment;
        rep.lhs_extrapolated = std::max(0.0, m_fine + (m_fine - m_coarse) / 3.0);

        const BoundResult b = berezin_rhs(profile, cs, q);
        rep.rhs = b.rhs;
        rep.epsilon_used = b.epsilon_used;
        rep.margin = b.rhs - rep.lhs_extrapolated;
        rep.pass = bound_satisfied(rep.lhs_extrapolated, b.rhs);
        reports.push_back(std::move(rep));
    }
    return reports;
}

VerificationReport verify_bound(const TwistProfile& profile, const CrossSection& cs,
                                std::span<const GridSpec> specs, const BoundQuery& query,
                                const EigenOptions& opt) {
    const std::array<BoundQuery, 1> queries{query};
    auto reports =
        verify_bound_sweep(profile, cs, specs, std::span<const BoundQuery>(queries), opt);
    return std::move(reports.front());
}

Interval suggest_window(const TwistProfile& profile, PotentialVariant variant, double lambda,
                        double epsilon, double margin) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ValidationError("suggest_window: epsilon must lie in (0, 1)");
    if (!(lambda >= 0.0)) throw ValidationError("suggest_window: lambda must be >= 0");
    const EffectivePotential V(profile, variant);

    const Interval limits = profile.family() == ProfileFamily::Tabulated
                                ? profile.domain()
                                : Interval{-std::numeric_limits<double>::infinity(),
                                           std::numeric_limits<double>::infinity()};
    if (lambda == 0.0)
        return {std::floor(V.minus_threshold() - margin - 1.0),
                std::ceil(V.plus_threshold() + margin + 1.0)};

    auto deep = [&](double x) { return epsilon * V(x) >= 2.0 * lambda; };
    auto edge = [&](double threshold, int dir, double limit) {
        if (deep(threshold)) return threshold;
        const auto bracket = expand_until(deep, threshold, 0.5, dir, limit);
        return solve_bracketed([&](double x) { return epsilon * V(x) - 2.0 * lambda; },
                               std::min(bracket.first, bracket.second),
                               std::max(bracket.first, bracket.second));
    };
    const double plus = edge(V.plus_threshold(), +1, limits.hi);
    const double minus = edge(V.minus_threshold(), -1, limits.lo);
    return {std::floor(minus - margin), std::ceil(plus + margin)};
}

}  // namespace twistbound
