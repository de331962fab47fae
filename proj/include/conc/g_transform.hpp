#pragma once

#include <span>
#include <string>
#include <vector>

#include "conc/psi.hpp"

namespace conc {

// Decreasing rate function on (0,1] with gamma(0) = +infinity.
struct GammaSpec {
    std::string label;
    std::function<double(double)> eval;
    std::function<double(double)> deriv;  // may be empty
};

GammaSpec log_inverse_gamma();                  // log(1/r)
GammaSpec scaled_log_inverse_gamma(double c);   // c log(1/r)

// Lower envelope of eta -> psi(1-theta) + theta*eta over theta in [0,1],
// together with its minimizer. The minimizer solves psi'(1-theta) = eta on
// the root branch and is found by bisection (cap 200 iterations).
class GTransform {
public:
    explicit GTransform(PsiSpec psi, double root_tol = 1e-12);

    double pointwise(double eta, double theta) const;  // psi(1-theta) + theta*eta
    double minimizer(double eta) const;                // in [0,1]; 1 at eta=0, 0 past psi'(1)
    double value(double eta) const;                    // 0 at eta=0, psi(1) at eta=+inf
    double second_derivative(double eta) const;        // -1/psi''(1-minimizer), root branch only

    const PsiSpec& psi() const { return psi_; }

private:
    PsiSpec psi_;
    double root_tol_;
};

struct ConcavityReport {
    bool concave = false;
    double worst_excess = 0.0;  // largest chord excess above the profile
    double worst_r = 0.0;
    double scale = 0.0;         // max |L| over the grid
    std::size_t points = 0;
};

// Chord test for concavity of L(r) = exp(G(gamma(r) - gamma(r0))) on
// {0} u grid, grid within (0, r0]. The r = 0 endpoint takes the limit value
// exp(psi(1)). A point fails when the chord through its neighbours exceeds
// the profile by more than rel_tol * max|L|.
ConcavityReport concavity_profile(const PsiSpec& psi, const GammaSpec& gamma, double r0,
                                  std::span<const double> grid, double rel_tol = 1e-9);

// Geometric grid from r0*min_ratio up to r0, refined toward zero.
std::vector<double> geometric_profile_grid(double r0, std::size_t count, double min_ratio = 1e-8);

// Sufficient condition for the profile above to be concave when the rate
// function satisfies xi'' <= k * xi'^2: psi''(1-theta) <= 1/(theta^2 + k theta).
GridCheckReport lemma_v_condition(const PsiSpec& psi, double curvature_bound,
                                  std::span<const double> thetas);

}  // namespace conc
