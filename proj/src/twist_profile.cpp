#include "twistbound/twist_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twistbound/errors.hpp"
#include "twistbound/root_finding.hpp"

namespace twistbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_s0(const std::optional<double>& s0) {
    if (s0 && (!(*s0 >= 0.0) || !std::isfinite(*s0)))
        throw ValidationError("profile: s0 must be finite and non-negative");
}

}  // namespace

TwistProfile TwistProfile::even_poly(std::vector<double> coefficients, std::optional<double> s0) {
    if (coefficients.size() < 2)
        throw ValidationError("even_poly: need at least A_0 and A_1 (m >= 1)");
    for (std::size_t k = 1; k < coefficients.size(); ++k)
        if (!(coefficients[k] >= 0.0))
            throw ValidationError("even_poly: A_k must be >= 0 for k >= 1");
    if (!(coefficients.back() > 0.0)) throw ValidationError("even_poly: leading A_m must be > 0");
    check_s0(s0);

    TwistProfile p;
    p.family_ = ProfileFamily::EvenPoly;
    p.coeffs_ = std::move(coefficients);
    p.theta0_ = p.coeffs_[0];
    p.s0_ = s0;
    return p;
}

TwistProfile TwistProfile::odd_poly(std::vector<double> coefficients, double theta0,
                                    std::optional<double> s0) {
    if (coefficients.empty()) throw ValidationError("odd_poly: need at least one coefficient");
    for (double a : coefficients)
        if (!(a >= 0.0)) throw ValidationError("odd_poly: all A_k must be >= 0");
    if (!(coefficients.back() > 0.0)) throw ValidationError("odd_poly: leading A_m must be > 0");
    check_s0(s0);

    TwistProfile p;
    p.family_ = ProfileFamily::OddPoly;
    p.coeffs_ = std::move(coefficients);
    p.theta0_ = theta0;
    p.s0_ = s0;
    return p;
}

TwistProfile TwistProfile::tabulated(std::vector<double> x, std::vector<double> theta,
                                     std::vector<double> dtheta, std::optional<double> s0) {
    if (x.size() < 2 || x.size() != theta.size() || x.size() != dtheta.size())
        throw ValidationError("tabulated: need >= 2 samples with matching arrays");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw ValidationError("tabulated: x samples must be increasing");
    if (!(x.front() <= 0.0 && x.back() >= 0.0))
        throw ValidationError("tabulated: sampled window must contain 0");
    check_s0(s0);

    TwistProfile p;
    p.family_ = ProfileFamily::Tabulated;
    p.domain_ = {x.front(), x.back()};
    p.tab_x_ = std::move(x);
    p.tab_theta_ = std::move(theta);
    p.tab_dtheta_ = std::move(dtheta);
    p.s0_ = s0;
    p.theta0_ = p.tabulated_eval(0.0).theta;
    return p;
}

double TwistProfile::poly_theta(double x) const {
    // Horner in x^2; odd family carries an extra factor x and the offset.
    const double x2 = x * x;
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x2 + *it;
    return family_ == ProfileFamily::EvenPoly ? acc : theta0_ + acc * x;
}

double TwistProfile::poly_dtheta(double x) const {
    const double x2 = x * x;
    double acc = 0.0;
    if (family_ == ProfileFamily::EvenPoly) {
        for (std::size_t k = coeffs_.size(); k-- > 1;)
            acc = acc * x2 + 2.0 * static_cast<double>(k) * coeffs_[k];
        return acc * x;
    }
    for (std::size_t k = coeffs_.size(); k-- > 0;)
        acc = acc * x2 + (2.0 * static_cast<double>(k) + 1.0) * coeffs_[k];
    return acc;
}

ProfileEval TwistProfile::tabulated_eval(double x) const {
    const auto& xs = tab_x_;
    if (x < xs.front() || x > xs.back())
        throw DomainError("tabulated profile: query outside sampled window");
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = (it == xs.begin()) ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    i = std::min(i, xs.size() - 2);

    const double h = xs[i + 1] - xs[i];
    const double t = (x - xs[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double y0 = tab_theta_[i], y1 = tab_theta_[i + 1];
    const double m0 = tab_dtheta_[i], m1 = tab_dtheta_[i + 1];

    const double theta = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 +
                         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
    const double dtheta = (6 * t2 - 6 * t) * (y0 - y1) / h + (3 * t2 - 4 * t + 1) * m0 +
                          (3 * t2 - 2 * t) * m1;
    return {theta, dtheta};
}

ProfileEval TwistProfile::eval(double x1) const {
    if (!std::isfinite(x1)) throw DomainError("profile eval: x1 must be finite");
    if (family_ == ProfileFamily::Tabulated) return tabulated_eval(x1);
    return {poly_theta(x1), poly_dtheta(x1)};
}

void TwistProfile::require_monotone_branch(Branch branch, double anchor) const {
    if (family_ != ProfileFamily::Tabulated) return;  // guaranteed for polynomials
    const bool plus = branch == Branch::Plus;
    double prev = kInf * (plus ? -1.0 : 1.0);
    bool seen = false;
    int direction = 0;  // +1 increasing with |z|, -1 decreasing
    for (std::size_t i = 0; i < tab_x_.size(); ++i) {
        const std::size_t j = plus ? i : tab_x_.size() - 1 - i;
        if (plus ? tab_x_[j] < anchor : tab_x_[j] > anchor) continue;
        if (seen) {
            const double step = tab_theta_[j] - prev;
            if (step == 0.0 || (direction != 0 && (step > 0) != (direction > 0)))
                throw ValidationError("tabulated profile: branch is not strictly monotone");
            if (direction == 0) direction = step > 0 ? 1 : -1;
        }
        prev = tab_theta_[j];
        seen = true;
    }
}

double TwistProfile::branch_inverse(Branch branch, double alpha) const {
    return branch_inverse_from(branch, alpha, 0.0);
}

double TwistProfile::branch_inverse_from(Branch branch, double alpha, double anchor) const {
    const bool plus = branch == Branch::Plus;
    if (plus ? anchor < 0.0 : anchor > 0.0)
        throw DomainError("branch_inverse: anchor on the wrong side of 0");
    require_monotone_branch(branch, anchor);

    const double theta_anchor = theta(anchor);
    const double slack = 1e-9 * (1.0 + std::abs(alpha) + std::abs(theta_anchor));

    // Direction in which theta moves as |z| grows along the branch.
    double probe_limit = family_ == ProfileFamily::Tabulated
                             ? (plus ? domain_.hi : domain_.lo)
                             : (plus ? kInf : -kInf);
    if (plus ? anchor >= probe_limit : anchor <= probe_limit) {
        if (std::abs(alpha - theta_anchor) <= slack) return anchor;
        throw DomainError("branch_inverse: degenerate branch");
    }
    const double probe = family_ == ProfileFamily::Tabulated
                             ? anchor + 0.5 * (probe_limit - anchor)
                             : anchor + (plus ? 1.0 : -1.0);
    const bool increasing = theta(probe) >= theta_anchor;

    const bool toward_branch = increasing ? alpha >= theta_anchor : alpha <= theta_anchor;
    if (!toward_branch) {
        if (std::abs(alpha - theta_anchor) <= slack) return anchor;
        throw DomainError("branch_inverse: alpha outside branch range");
    }

    auto reached = [&](double x) {
        const double t = theta(x);
        return increasing ? t >= alpha : t <= alpha;
    };
    std::pair<double, double> bracket;
    try {
        bracket = expand_until(reached, anchor, 1.0, plus ? 1 : -1, probe_limit);
    } catch (const NumericalError&) {
        throw DomainError("branch_inverse: alpha outside branch range");
    }
    const double lo = std::min(bracket.first, bracket.second);
    const double hi = std::max(bracket.first, bracket.second);
    if (lo == hi) return lo;
    return solve_monotone([this](double x) { return theta(x); }, lo, hi, alpha);
}

ConditionReport validate_conditions(const TwistProfile& profile, Interval window,
                                    double dtheta_threshold) {
    if (window.empty()) throw ValidationError("validate_conditions: empty window");
    if (std::abs(window.lo + window.hi) > 1e-9 * window.length())
        throw ValidationError("validate_conditions: window must be symmetric about 0");
    if (!(dtheta_threshold > 0.0))
        throw ValidationError("validate_conditions: dtheta_threshold must be > 0");

    constexpr int kHalf = 2048;  // 2*kHalf+1 samples, always including x = 0
    const int n = 2 * kHalf + 1;
    std::vector<double> xs(n), d(n);
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) {
        xs[i] = window.lo + window.length() * static_cast<double>(i) / (n - 1);
        if (i == kHalf) xs[i] = 0.0;
        d[i] = profile.dtheta(xs[i]);
        dmax = std::max(dmax, std::abs(d[i]));
    }
    const double eps = 1e-11 * std::max(1.0, dmax);

    // Scan each half from the window end inward, recording the innermost
    // |s| at which a condition set first breaks. plus side: i in [kHalf, n).
    auto scan = [&](bool even_set) {
        double s_plus = kInf, s_minus = kInf;
        // plus side: require d >= -eps and (both sets) d nondecreasing outward.
        bool ok = true;
        for (int i = n - 1; i >= kHalf; --i) {
            bool good = d[i] >= -eps;
            if (i + 1 < n) good = good && d[i] <= d[i + 1] + eps;
            if (!good) {
                ok = false;
                s_plus = (i + 1 < n) ? xs[i + 1] : kInf;
                break;
            }
        }
        if (ok) s_plus = 0.0;
        // minus side: even set wants d <= 0 and nondecreasing in x1,
        // odd set wants d >= 0 and nonincreasing in x1.
        ok = true;
        for (int i = 0; i <= kHalf; ++i) {
            bool good = even_set ? d[i] <= eps : d[i] >= -eps;
            if (i > 0)
                good = good && (even_set ? d[i] >= d[i - 1] - eps : d[i] <= d[i - 1] + eps);
            if (!good) {
                ok = false;
                s_minus = (i > 0) ? -xs[i - 1] : kInf;
                break;
            }
        }
        if (ok) s_minus = 0.0;
        return std::max(s_plus, s_minus);
    };

    const double s0_even = scan(true);
    const double s0_odd = scan(false);

    ConditionReport report;
    report.even_conditions_ok = s0_even == 0.0;
    report.odd_conditions_ok = s0_odd == 0.0;
    report.effective_s0 = std::min(s0_even, s0_odd);
    report.explosion_ok =
        std::abs(d.front()) >= dtheta_threshold && std::abs(d.back()) >= dtheta_threshold;
    return report;
}

}  // namespace twistbound
