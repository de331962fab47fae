#include "conc/g_transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace conc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GammaSpec log_inverse_gamma() {
    GammaSpec spec;
    spec.label = "log_inv";
    spec.eval = [](double r) {
        if (r <= 0.0) return kInf;
        return -std::log(r);
    };
    spec.deriv = [](double r) { return -1.0 / r; };
    return spec;
}

GammaSpec scaled_log_inverse_gamma(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("gamma scale must be positive");
    GammaSpec spec;
    char label[32];
    std::snprintf(label, sizeof(label), "c_log_inv(c=%g)", c);
    spec.label = label;
    spec.eval = [c](double r) {
        if (r <= 0.0) return kInf;
        return -c * std::log(r);
    };
    spec.deriv = [c](double r) { return -c / r; };
    return spec;
}

GTransform::GTransform(PsiSpec psi, double root_tol)
    : psi_(std::move(psi)), root_tol_(root_tol) {
    if (!(root_tol_ > 0.0)) throw std::invalid_argument("root tolerance must be positive");
}

double GTransform::pointwise(double eta, double theta) const {
    if (!(eta >= 0.0)) throw std::domain_error("eta must be nonnegative");
    theta = std::clamp(theta, 0.0, 1.0);
    if (std::isinf(eta)) return theta > 0.0 ? kInf : psi_.value_at_one;
    return psi_.eval(1.0 - theta) + theta * eta;
}

double GTransform::minimizer(double eta) const {
    if (!(eta >= 0.0)) throw std::domain_error("eta must be nonnegative");
    if (eta == 0.0) return 1.0;
    if (std::isinf(eta) || eta >= psi_.deriv_at_one) return 0.0;

    // psi'(1-theta) decreases continuously from psi'(1) to 0 on theta in
    // [0,1]; bisect for the crossing with eta. The interval keeps halving
    // past the configured tolerance relative to its right endpoint, so tiny
    // roots come out with full relative precision.
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (psi_.deriv(1.0 - mid) > eta)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= root_tol_ * hi) break;
    }
    return 0.5 * (lo + hi);
}

double GTransform::value(double eta) const {
    if (!(eta >= 0.0)) throw std::domain_error("eta must be nonnegative");
    if (eta == 0.0) return 0.0;
    if (std::isinf(eta) || eta >= psi_.deriv_at_one) return psi_.value_at_one;
    const double g = minimizer(eta);
    return psi_.eval(1.0 - g) + eta * g;
}

double GTransform::second_derivative(double eta) const {
    if (!(eta > 0.0) || eta >= psi_.deriv_at_one)
        throw std::domain_error("second derivative defined only on the root branch");
    const double g = minimizer(eta);
    return -1.0 / psi_.second_deriv(1.0 - g);
}

ConcavityReport concavity_profile(const PsiSpec& psi, const GammaSpec& gamma, double r0,
                                  std::span<const double> grid, double rel_tol) {
    if (!(r0 > 0.0 && r0 <= 1.0)) throw std::invalid_argument("r0 must lie in (0,1]");
    if (grid.empty()) throw std::invalid_argument("profile grid is empty");

    std::vector<double> rs(grid.begin(), grid.end());
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    if (rs.front() <= 0.0 || rs.back() > r0 + 1e-15)
        throw std::invalid_argument("profile grid must lie in (0, r0]");
    rs.insert(rs.begin(), 0.0);  // L(0) = exp(psi(1)) by the xi(0) = inf limit

    const GTransform transform(psi);
    const double gamma_r0 = gamma.eval(r0);
    std::vector<double> profile(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (rs[i] == 0.0) {
            profile[i] = std::exp(psi.value_at_one);
            continue;
        }
        const double xi = std::max(gamma.eval(rs[i]) - gamma_r0, 0.0);
        profile[i] = std::exp(transform.value(xi));
    }

    ConcavityReport report;
    report.points = rs.size();
    for (double v : profile) report.scale = std::max(report.scale, std::abs(v));
    report.worst_excess = -std::numeric_limits<double>::infinity();
    // Concavity means every interior value sits on or above the chord
    // through its neighbours; the excess below measures the violation.
    for (std::size_t i = 1; i + 1 < rs.size(); ++i) {
        const double span = rs[i + 1] - rs[i - 1];
        const double chord = (profile[i - 1] * (rs[i + 1] - rs[i]) +
                              profile[i + 1] * (rs[i] - rs[i - 1])) /
                             span;
        const double excess = chord - profile[i];
        if (excess > report.worst_excess) {
            report.worst_excess = excess;
            report.worst_r = rs[i];
        }
    }
    report.concave = report.worst_excess <= rel_tol * report.scale;
    return report;
}

std::vector<double> geometric_profile_grid(double r0, std::size_t count, double min_ratio) {
    if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
    if (count < 3) throw std::invalid_argument("profile grid needs at least three points");
    if (!(min_ratio > 0.0 && min_ratio < 1.0))
        throw std::invalid_argument("min_ratio must lie in (0,1)");
    std::vector<double> rs(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(count - 1);
        rs[i] = r0 * std::pow(min_ratio, 1.0 - frac);
    }
    rs.back() = r0;
    return rs;
}

GridCheckReport lemma_v_condition(const PsiSpec& psi, double curvature_bound,
                                  std::span<const double> thetas) {
    if (!(curvature_bound >= 0.0))
        throw std::invalid_argument("curvature bound must be nonnegative");
    GridCheckReport report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    report.points = thetas.size();
    for (double theta : thetas) {
        if (!(theta > 0.0 && theta < 1.0))
            throw std::domain_error("lemma grid must lie in (0,1)");
        const double rhs = 1.0 / (theta * theta + curvature_bound * theta);
        const double margin = rhs - psi.second_deriv(1.0 - theta);
        if (margin < report.worst_margin) {
            report.worst_margin = margin;
            report.worst_point = theta;
        }
    }
    report.passed = report.worst_margin >= -1e-10;
    return report;
}

}  // namespace conc
