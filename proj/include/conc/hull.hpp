#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "conc/product_space.hpp"
#include "conc/psi.hpp"

namespace conc {

// Vertex list of conv{ hamming_pattern(x, y) : y in A } in [0,1]^n.
struct HullProblem {
    std::vector<HammingPattern> vertices;  // deduplicated, sorted
    int dimension = 0;
};

struct HullSolution {
    std::vector<double> point;    // minimizer xi in [0,1]^n
    std::vector<double> weights;  // barycentric coefficients over vertices
    double objective = 0.0;
    double gap = 0.0;             // Frank-Wolfe duality gap at the returned point
    std::size_t iterations = 0;
    bool converged = true;
};

// Separable convex objective sum_i value(xi_i). slope may return +infinity
// at 1; slope_arg_cap < 1 tells the solver to evaluate slopes at
// min(t, cap) so direction scores stay finite while iterates pass through
// the boundary.
struct CoordinateCost {
    std::function<double(double)> value;
    std::function<double(double)> slope;
    double slope_arg_cap = 1.0;
};

HullProblem build_hull(const Point& x, const PointSet& a);

// Pairwise conditional gradient with exact line search (bisection on the
// directional derivative). Terminates when the duality gap
// max_v <grad, xi - v> falls below gap_tol; the returned objective is then
// within gap of the optimum. Hitting the iteration cap is reported through
// converged = false, with the last iterate still returned.
HullSolution minimize_over_hull(const HullProblem& problem, const CoordinateCost& cost,
                                double gap_tol = 1e-9, std::size_t max_iterations = 100'000);

struct DistanceResult {
    double distance = 0.0;  // sqrt of the min-norm-squared point of the hull
    HullSolution solution;
};
DistanceResult convex_distance(const Point& x, const PointSet& a, double gap_tol = 1e-12);

struct FunctionalResult {
    double value = 0.0;  // min over the hull of sum_i psi(xi_i)
    HullSolution solution;
};
FunctionalResult psi_functional(const Point& x, const PointSet& a, const PsiSpec& psi,
                                double gap_tol = 1e-10);

// Exact min-norm point by enumerating vertex subsets of size <= n+1 and
// projecting the origin onto each affine hull via the normal equations,
// keeping candidates with nonnegative barycentric weights. Caps: |V| <= 12,
// n <= 10.
double brute_force_min_norm(const HullProblem& problem);

// Upper-bounding oracle: barycentric grid search at the given resolution
// followed by one pairwise line-search refinement pass. Cap: |V| <= 4.
double brute_force_psi_minimum(const HullProblem& problem, const PsiSpec& psi,
                               int grid_resolution = 48);

// w* = xi*/|xi*| together with d_{w*}(x, A). Valid only when the distance is
// positive; the weighted distance matches the convex distance up to solver
// tolerance, witnessing that the sup- and hull-forms agree.
struct DualCertificate {
    WeightVector direction;
    double weighted_distance = 0.0;
};
DualCertificate dual_weight_certificate(const Point& x, const PointSet& a,
                                        const HullSolution& solution);

}  // namespace conc
