#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "twistbound/bound.hpp"
#include "twistbound/errors.hpp"
#include "twistbound/grid.hpp"
#include "twistbound/tolerances.hpp"

namespace twistbound {

struct EigenOptions {
    double tol = tol::kEigResidual;  // relative residual per eigenpair
    int max_iterations = 500;
    int initial_block = 16;
    int max_block = 220;
    int dense_dim_limit = 600;    // below this, use a direct dense solve
    int inertia_dim_limit = 50000;  // LDLT count certification limit
    std::uint64_t seed = 0x74776973746564ULL;
    const Eigen::MatrixXd* initial_guess = nullptr;  // columns seed the block
};

struct SpectrumResult {
    std::vector<double> eigenvalues;  // ascending, strictly below cutoff
    std::vector<double> residuals;    // ||Av - lambda v|| / (|lambda| ||v||)
    Eigen::MatrixXd vectors;          // matching columns
    double cutoff = 0.0;
    int iterations = 0;
    bool inertia_checked = false;
    int inertia_count = -1;
};

class EigensolverFailure : public NumericalError {
public:
    EigensolverFailure(const std::string& msg, SpectrumResult partial)
        : NumericalError(msg), partial_(std::move(partial)) {}
    const SpectrumResult& partial() const { return partial_; }

private:
    SpectrumResult partial_;
};

/// Every eigenvalue of the symmetric operator below `cutoff`, by blocked
/// preconditioned Rayleigh-Ritz minimization (LOBPCG) with an incomplete
/// Cholesky preconditioner. The block grows until a converged eigenvalue
/// exceeds the cutoff; when the dimension permits, the count below the cutoff
/// is certified against the inertia of an LDLT factorization at that shift.
/// Small operators are solved densely. Throws EigensolverFailure (carrying
/// partial results) on a blown iteration budget.
SpectrumResult lowest_eigenvalues(const SparseOperator& op, double cutoff,
                                  const EigenOptions& opt = {});

/// Spectrum of a discretized truncated tube, with the grid it came from.
struct Spectrum {
    std::vector<double> eigenvalues;
    std::vector<double> residuals;
    double cutoff = 0.0;
    GridSpec grid;
};

/// mask -> assemble -> solve pipeline.
Spectrum solve_spectrum(const TwistProfile& profile, const CrossSection& cs,
                        const GridSpec& spec, double cutoff, const EigenOptions& opt = {});

/// sum_k (lambda_k - Lambda)_-^sigma. sigma = 0 counts eigenvalues <= Lambda.
double eigenvalue_moment(std::span<const double> eigenvalues, double lambda, double sigma);

/// Same, refusing spectra whose cutoff is below Lambda (incomplete data).
double eigenvalue_moment(const Spectrum& spectrum, double lambda, double sigma);

/// The verification acceptance predicate: lhs <= rhs * (1 + tolerance),
/// degenerating to lhs <= tolerance-free equality when rhs is zero.
bool bound_satisfied(double lhs, double rhs, double tolerance = tol::kVerify);

struct VerificationGridResult {
    GridSpec spec;
    int interior_nodes = 0;
    std::vector<double> eigenvalues;
    double moment = 0.0;
};

struct VerificationReport {
    BoundQuery query;
    std::vector<VerificationGridResult> grids;
    double lhs_extrapolated = 0.0;
    double rhs = 0.0;
    double epsilon_used = 0.0;
    double margin = 0.0;
    bool pass = false;
};

/// Full verification: solve each grid of a refinement sequence (h halving,
/// shared window), Richardson-extrapolate the moment across the two finest
/// grids, evaluate the bound, and compare.
VerificationReport verify_bound(const TwistProfile& profile, const CrossSection& cs,
                                std::span<const GridSpec> specs, const BoundQuery& query,
                                const EigenOptions& opt = {});

/// Sweep form: one eigensolve per grid at the largest requested Lambda,
/// shared across all queries.
std::vector<VerificationReport> verify_bound_sweep(const TwistProfile& profile,
                                                   const CrossSection& cs,
                                                   std::span<const GridSpec> specs,
                                                   std::span<const BoundQuery> queries,
                                                   const EigenOptions& opt = {});

/// Axial window on which eps * f >= 2 * lambda holds outside an inner core,
/// rounded outward to integers. Truncating there keeps the moment bias small
/// and on the safe side.
Interval suggest_window(const TwistProfile& profile, PotentialVariant variant, double lambda,
                        double epsilon, double margin = 1.0);

}  // namespace twistbound
