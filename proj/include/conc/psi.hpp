#pragma once

#include <functional>
#include <span>
#include <string>

namespace conc {

// Convex, increasing cost on [0,1] with psi(0) = psi'(0) = 0. The slope at 1
// may be +infinity (it is for the psi_c family), so it is kept as an
// extended real alongside the callable.
struct PsiSpec {
    std::string label;
    std::function<double(double)> eval;          // [0,1] -> R+
    std::function<double(double)> deriv;         // [0,1] -> R+ u {+inf}
    std::function<double(double)> second_deriv;  // (0,1) -> R+
    double deriv_at_one = 0.0;
    double value_at_one = 0.0;
};

// Parameter of the psi_c family; the paper's series ratio R_c = 1/(1+c).
struct CParam {
    explicit CParam(double c_value);
    double c;
    double ratio;
};

PsiSpec quadratic_psi();       // theta^2 / 4
PsiSpec psi_c_spec(double c);  // the one-parameter family below

// Closed form
//   psi_c(t) = [ (1-t)log(1-t) - (1-t+c) log((1-t+c)/(1+c)) ] / c,
// with the t -> 1 limit of (1-t)log(1-t) taken as 0.
double psi_c_closed(double theta, double c);

// Power series sum_{k>=2} theta^k/k * (R + ... + R^{k-1})/(k-1), truncated
// when the geometric tail bound theta^{k+1}/((1-theta)(k+1)) drops below
// tail_tol. Diverges at theta = 1 (use the closed form there).
double psi_c_series(double theta, double c, double tail_tol = 1e-12);

// psi_c''(u) = 1/((1-u)^2 + c(1-u)) for u in (0,1).
double psi_c_second_derivative(double u, double c);

struct GridCheckReport {
    bool passed = false;
    double worst_margin = 0.0;  // min over the grid of rhs - lhs
    double worst_point = 0.0;
    std::size_t points = 0;
};

// psi_c(theta) >= theta^2/(2+2c) on the grid (margin tolerance 1e-12).
GridCheckReport psi_c_lower_bound_check(std::span<const double> thetas, double c);

// psi''(1-theta) <= 1/(theta^2 + c theta) on a grid in (0,1); violations are
// reported through the margins, never thrown.
GridCheckReport check_differential_inequality(const PsiSpec& psi, double c,
                                              std::span<const double> thetas);

}  // namespace conc
