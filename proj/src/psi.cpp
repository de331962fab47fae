#include "conc/psi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace conc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_unit(double theta, const char* what) {
    if (!(theta >= -1e-12 && theta <= 1.0 + 1e-12))
        throw std::domain_error(std::string(what) + ": argument outside [0,1]");
    return std::clamp(theta, 0.0, 1.0);
}

// psi_c'(theta) = ( -log(1-theta) + log1p(-theta/(1+c)) ) / c, +inf at 1.
double psi_c_slope(double theta, double c) {
    theta = std::clamp(theta, 0.0, 1.0);
    if (theta >= 1.0) return kInf;
    return (-std::log(1.0 - theta) + std::log1p(-theta / (1.0 + c))) / c;
}

}  // namespace

CParam::CParam(double c_value) : c(c_value), ratio(1.0 / (1.0 + c_value)) {
    if (!(c_value > 0.0)) throw std::invalid_argument("c must be positive");
}

PsiSpec quadratic_psi() {
    PsiSpec spec;
    spec.label = "quadratic";
    spec.eval = [](double t) { return t * t / 4.0; };
    spec.deriv = [](double t) { return t / 2.0; };
    spec.second_deriv = [](double) { return 0.5; };
    spec.deriv_at_one = 0.5;
    spec.value_at_one = 0.25;
    return spec;
}

double psi_c_closed(double theta, double c) {
    CParam cp(c);
    theta = clamp_unit(theta, "psi_c_closed");
    const double u = 1.0 - theta;
    // (1-t)log(1-t) -> 0 as t -> 1; guard the underflow region explicitly.
    const double xlogx = u < 1e-300 ? 0.0 : u * std::log(u);
    // log((1-t+c)/(1+c)) written as log1p(-t/(1+c)) to avoid cancellation.
    const double log_ratio = std::log1p(-theta / (1.0 + cp.c));
    const double value = (xlogx - (u + cp.c) * log_ratio) / cp.c;
    return std::max(value, 0.0);
}

double psi_c_series(double theta, double c, double tail_tol) {
    CParam cp(c);
    if (!(tail_tol > 0.0)) throw std::invalid_argument("tail_tol must be positive");
    if (theta >= 1.0)
        throw std::domain_error("psi_c_series: diverges at theta = 1, use the closed form");
    theta = clamp_unit(theta, "psi_c_series");
    if (theta == 0.0) return 0.0;

    const double r = cp.ratio;
    double theta_pow = theta * theta;  // theta^k
    double r_pow = r;                  // R^(k-1)
    double r_partial = r;              // R + ... + R^(k-1)
    double sum = 0.0;
    for (std::size_t k = 2; k < 2'000'000; ++k) {
        sum += theta_pow / static_cast<double>(k) * r_partial / static_cast<double>(k - 1);
        theta_pow *= theta;
        // The bracketed factor never exceeds 1, so the remainder is below
        // theta^{k+1} / ((1-theta)(k+1)).
        if (theta_pow / ((1.0 - theta) * static_cast<double>(k + 1)) < tail_tol) break;
        r_pow *= r;
        r_partial += r_pow;
    }
    return sum;
}

double psi_c_second_derivative(double u, double c) {
    CParam cp(c);
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("psi_c_second_derivative: argument must lie in (0,1)");
    const double theta = 1.0 - u;
    return 1.0 / (theta * theta + cp.c * theta);
}

PsiSpec psi_c_spec(double c) {
    CParam cp(c);
    PsiSpec spec;
    char label[32];
    std::snprintf(label, sizeof(label), "psi_c(c=%g)", cp.c);
    spec.label = label;
    const double cc = cp.c;
    spec.eval = [cc](double t) { return psi_c_closed(std::clamp(t, 0.0, 1.0), cc); };
    spec.deriv = [cc](double t) { return psi_c_slope(t, cc); };
    spec.second_deriv = [cc](double u) { return psi_c_second_derivative(u, cc); };
    spec.deriv_at_one = kInf;
    spec.value_at_one = std::log1p(1.0 / cc);  // log((1+c)/c)
    return spec;
}

GridCheckReport psi_c_lower_bound_check(std::span<const double> thetas, double c) {
    CParam cp(c);
    GridCheckReport report;
    report.passed = true;
    report.worst_margin = std::numeric_limits<double>::infinity();
    report.points = thetas.size();
    for (double theta : thetas) {
        const double bound = theta * theta / (2.0 + 2.0 * cp.c);
        const double margin = psi_c_closed(theta, cp.c) - bound;
        if (margin < report.worst_margin) {
            report.worst_margin = margin;
            report.worst_point = theta;
        }
    }
    report.passed = report.worst_margin >= -1e-12;
    return report;
}

GridCheckReport check_differential_inequality(const PsiSpec& psi, double c,
                                              std::span<const double> thetas) {
    if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
    GridCheckReport report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    report.points = thetas.size();
    for (double theta : thetas) {
        if (!(theta > 0.0 && theta < 1.0))
            throw std::domain_error("differential inequality grid must lie in (0,1)");
        const double rhs = 1.0 / (theta * theta + c * theta);
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
