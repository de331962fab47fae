#include "conc/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace conc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense solve of a small linear system by Gaussian elimination with partial
// pivoting. Returns false when a pivot collapses (singular subset).
bool solve_linear(std::vector<std::vector<double>>& m, std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
        if (std::abs(m[pivot][col]) < 1e-10) return false;
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col) continue;
            const double f = m[row][col] / m[col][col];
            if (f == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) m[row][k] -= f * m[col][k];
            rhs[row] -= f * rhs[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) rhs[i] /= m[i][i];
    return true;
}

}  // namespace

HullProblem build_hull(const Point& x, const PointSet& a) {
    if (a.empty()) throw std::invalid_argument("hull requires a nonempty set");
    if (x.dimension() != a.alphabet().dimension())
        throw std::invalid_argument("point dimension does not match the set");
    HullProblem problem;
    problem.dimension = x.dimension();
    problem.vertices.reserve(a.size());
    for (const Point& y : a.points()) problem.vertices.push_back(hamming_pattern(x, y));
    std::sort(problem.vertices.begin(), problem.vertices.end());
    problem.vertices.erase(std::unique(problem.vertices.begin(), problem.vertices.end()),
                           problem.vertices.end());
    return problem;
}

HullSolution minimize_over_hull(const HullProblem& problem, const CoordinateCost& cost,
                                double gap_tol, std::size_t max_iterations) {
    const auto& vertices = problem.vertices;
    if (vertices.empty()) throw std::invalid_argument("hull has no vertices");
    if (!(gap_tol > 0.0)) throw std::invalid_argument("gap tolerance must be positive");
    const int n = problem.dimension;
    const std::size_t m = vertices.size();
    for (const auto& v : vertices)
        if (v.dimension() != n) throw std::invalid_argument("vertex dimension mismatch");

    // Coordinates where every vertex agrees cannot move; they contribute a
    // fixed offset and stay out of the direction search (the slope there may
    // be infinite when the shared bit is 1).
    std::vector<int> active;
    double fixed_objective = 0.0;
    for (int i = 0; i < n; ++i) {
        bool constant = true;
        for (std::size_t v = 1; v < m && constant; ++v)
            constant = vertices[v].bits[static_cast<std::size_t>(i)] ==
                       vertices[0].bits[static_cast<std::size_t>(i)];
        if (constant)
            fixed_objective += cost.value(vertices[0].bits[static_cast<std::size_t>(i)] ? 1.0 : 0.0);
        else
            active.push_back(i);
    }

    HullSolution out;
    out.weights.assign(m, 0.0);

    auto expand_point = [&](const std::vector<double>& weights) {
        std::vector<double> xi(static_cast<std::size_t>(n), 0.0);
        for (std::size_t v = 0; v < m; ++v) {
            if (weights[v] == 0.0) continue;
            for (int i = 0; i < n; ++i)
                if (vertices[v].bits[static_cast<std::size_t>(i)]) xi[static_cast<std::size_t>(i)] += weights[v];
        }
        for (double& t : xi) t = std::clamp(t, 0.0, 1.0);
        return xi;
    };

    if (active.empty()) {  // single vertex after dedup
        out.weights[0] = 1.0;
        out.point = expand_point(out.weights);
        out.objective = fixed_objective;
        out.gap = 0.0;
        return out;
    }

    const std::size_t na = active.size();
    std::vector<std::vector<std::uint8_t>> av(m, std::vector<std::uint8_t>(na));
    for (std::size_t v = 0; v < m; ++v)
        for (std::size_t j = 0; j < na; ++j)
            av[v][j] = vertices[v].bits[static_cast<std::size_t>(active[j])];

    const double cap = cost.slope_arg_cap;
    auto slope_at = [&](double t) { return cost.slope(std::min(std::max(t, 0.0), cap)); };

    // Start at the cheapest vertex; in particular a zero pattern in the hull
    // finishes immediately with an exact objective of zero.
    std::size_t start = 0;
    double start_cost = kInf;
    for (std::size_t v = 0; v < m; ++v) {
        double s = 0.0;
        for (std::size_t j = 0; j < na; ++j)
            if (av[v][j]) s += cost.value(1.0);
        if (s < start_cost) {
            start_cost = s;
            start = v;
        }
    }
    out.weights[start] = 1.0;

    std::vector<double> xi(na);
    for (std::size_t j = 0; j < na; ++j) xi[j] = av[start][j];
    std::vector<double> grad(na);

    auto consolidate = [&]() {
        std::fill(xi.begin(), xi.end(), 0.0);
        for (std::size_t v = 0; v < m; ++v) {
            const double w = out.weights[v];
            if (w == 0.0) continue;
            for (std::size_t j = 0; j < na; ++j)
                if (av[v][j]) xi[j] += w;
        }
        for (double& t : xi) t = std::clamp(t, 0.0, 1.0);
    };

    // Refreshes grad, picks the Frank-Wolfe and away vertices (ties broken
    // toward the lowest index), and returns the duality gap.
    auto gap_and_directions = [&](std::size_t& fw, std::size_t& away) {
        for (std::size_t j = 0; j < na; ++j) grad[j] = slope_at(xi[j]);
        double along = 0.0;
        for (std::size_t j = 0; j < na; ++j) along += grad[j] * xi[j];
        double best_fw = kInf;
        double best_away = -kInf;
        fw = m;
        away = m;
        for (std::size_t v = 0; v < m; ++v) {
            double score = 0.0;
            for (std::size_t j = 0; j < na; ++j)
                if (av[v][j]) score += grad[j];
            if (score < best_fw) {
                best_fw = score;
                fw = v;
            }
            if (out.weights[v] > 0.0 && score > best_away) {
                best_away = score;
                away = v;
            }
        }
        return along - best_fw;
    };

    std::size_t iter = 0;
    bool converged = false;
    while (iter < max_iterations) {
        if (iter % 64 == 0) consolidate();
        std::size_t fw = m, away = m;
        double gap = gap_and_directions(fw, away);
        if (gap <= gap_tol) {
            consolidate();
            gap = gap_and_directions(fw, away);
            if (gap <= gap_tol) {
                converged = true;
                break;
            }
        }
        if (fw == away) {  // numerical floor: no pairwise direction left
            converged = gap <= gap_tol;
            break;
        }

        // Pairwise step: move weight from the away vertex toward the
        // Frank-Wolfe vertex along d = v_fw - v_away.
        const double step_max = out.weights[away];
        auto along_slope = [&](double t) {
            double s = 0.0;
            for (std::size_t j = 0; j < na; ++j) {
                const int d = static_cast<int>(av[fw][j]) - static_cast<int>(av[away][j]);
                if (d == 0) continue;
                s += slope_at(xi[j] + t * static_cast<double>(d)) * static_cast<double>(d);
            }
            return s;
        };

        double step;
        if (along_slope(step_max) <= 0.0) {
            step = step_max;
        } else {
            // The directional derivative is negative at 0 and increasing;
            // bisect for its zero.
            double lo = 0.0, hi = step_max;
            for (int b = 0; b < 100 && hi - lo > 1e-17; ++b) {
                const double mid = 0.5 * (lo + hi);
                if (along_slope(mid) < 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            step = 0.5 * (lo + hi);
        }

        if (step >= step_max) {
            step = step_max;
            out.weights[away] = 0.0;  // drop step
        } else {
            out.weights[away] -= step;
        }
        out.weights[fw] += step;
        for (std::size_t j = 0; j < na; ++j) {
            const int d = static_cast<int>(av[fw][j]) - static_cast<int>(av[away][j]);
            if (d != 0) xi[j] = std::clamp(xi[j] + step * static_cast<double>(d), 0.0, 1.0);
        }
        ++iter;
    }

    const double weight_sum = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
    if (weight_sum > 0.0 && weight_sum != 1.0)
        for (double& w : out.weights) w /= weight_sum;
    consolidate();
    std::size_t fw = m, away = m;
    out.gap = gap_and_directions(fw, away);
    out.iterations = iter;
    out.converged = converged;
    out.point = expand_point(out.weights);
    out.objective = fixed_objective;
    for (std::size_t j = 0; j < na; ++j) out.objective += cost.value(xi[j]);
    return out;
}

DistanceResult convex_distance(const Point& x, const PointSet& a, double gap_tol) {
    CoordinateCost quadratic;
    quadratic.value = [](double t) { return t * t; };
    quadratic.slope = [](double t) { return 2.0 * t; };
    auto solution = minimize_over_hull(build_hull(x, a), quadratic, gap_tol);
    return {std::sqrt(std::max(solution.objective, 0.0)), std::move(solution)};
}

FunctionalResult psi_functional(const Point& x, const PointSet& a, const PsiSpec& psi,
                                double gap_tol) {
    CoordinateCost cost;
    cost.value = psi.eval;
    cost.slope = psi.deriv;
    if (std::isinf(psi.deriv_at_one)) cost.slope_arg_cap = 1.0 - 1e-12;
    auto solution = minimize_over_hull(build_hull(x, a), cost, gap_tol);
    return {solution.objective, std::move(solution)};
}

double brute_force_min_norm(const HullProblem& problem) {
    const auto& vertices = problem.vertices;
    const std::size_t m = vertices.size();
    if (m == 0) throw std::invalid_argument("hull has no vertices");
    if (m > 12 || problem.dimension > 10)
        throw std::invalid_argument("brute_force_min_norm caps: |V| <= 12, n <= 10");

    std::vector<std::vector<double>> gram(m, std::vector<double>(m, 0.0));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
            int dot = 0;
            for (int i = 0; i < problem.dimension; ++i)
                dot += vertices[a].bits[static_cast<std::size_t>(i)] &
                       vertices[b].bits[static_cast<std::size_t>(i)];
            gram[a][b] = gram[b][a] = static_cast<double>(dot);
        }

    double best = kInf;
    for (std::size_t v = 0; v < m; ++v) best = std::min(best, gram[v][v]);

    const std::size_t subset_limit = static_cast<std::size_t>(1) << m;
    const std::size_t max_size = static_cast<std::size_t>(problem.dimension) + 1;
    for (std::size_t mask = 1; mask < subset_limit; ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t v = 0; v < m; ++v)
            if (mask & (static_cast<std::size_t>(1) << v)) idx.push_back(v);
        const std::size_t k = idx.size();
        if (k < 2 || k > max_size) continue;

        // Min-norm point of the affine hull: bordered normal equations
        // [G 1; 1' 0] [lambda; mu] = [0; 1].
        std::vector<std::vector<double>> sys(k + 1, std::vector<double>(k + 1, 0.0));
        std::vector<double> rhs(k + 1, 0.0);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) sys[a][b] = gram[idx[a]][idx[b]];
            sys[a][k] = 1.0;
            sys[k][a] = 1.0;
        }
        rhs[k] = 1.0;
        if (!solve_linear(sys, rhs)) continue;

        bool feasible = true;
        for (std::size_t a = 0; a < k && feasible; ++a) feasible = rhs[a] >= -1e-12;
        if (!feasible) continue;

        double norm2 = 0.0;
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) norm2 += rhs[a] * rhs[b] * gram[idx[a]][idx[b]];
        best = std::min(best, std::max(norm2, 0.0));
    }
    return std::sqrt(best);
}

double brute_force_psi_minimum(const HullProblem& problem, const PsiSpec& psi,
                               int grid_resolution) {
    const auto& vertices = problem.vertices;
    const std::size_t m = vertices.size();
    if (m == 0) throw std::invalid_argument("hull has no vertices");
    if (m > 4) throw std::invalid_argument("brute_force_psi_minimum cap: |V| <= 4");
    if (grid_resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
    const int n = problem.dimension;

    auto objective_of = [&](const std::vector<double>& weights) {
        double obj = 0.0;
        for (int i = 0; i < n; ++i) {
            double t = 0.0;
            for (std::size_t v = 0; v < m; ++v)
                if (vertices[v].bits[static_cast<std::size_t>(i)]) t += weights[v];
            obj += psi.eval(std::clamp(t, 0.0, 1.0));
        }
        return obj;
    };

    std::vector<double> best_weights(m, 0.0);
    best_weights[0] = 1.0;
    double best = objective_of(best_weights);

    // Exhaustive barycentric grid: weights k_v / resolution.
    std::vector<int> counts(m, 0);
    std::vector<double> weights(m, 0.0);
    const double res = static_cast<double>(grid_resolution);
    auto visit = [&](auto&& self, std::size_t v, int remaining) -> void {
        if (v + 1 == m) {
            counts[v] = remaining;
            for (std::size_t u = 0; u < m; ++u)
                weights[u] = static_cast<double>(counts[u]) / res;
            const double obj = objective_of(weights);
            if (obj < best) {
                best = obj;
                best_weights = weights;
            }
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            counts[v] = k;
            self(self, v + 1, remaining - k);
        }
    };
    visit(visit, 0, grid_resolution);

    // One refinement pass: exact pairwise line searches from the best grid
    // point. A descent sweep can only lower the grid minimum.
    const double cap = std::isinf(psi.deriv_at_one) ? 1.0 - 1e-12 : 1.0;
    weights = best_weights;
    for (std::size_t to = 0; to < m; ++to) {
        for (std::size_t from = 0; from < m; ++from) {
            if (to == from || weights[from] <= 0.0) continue;
            std::vector<double> xi(static_cast<std::size_t>(n), 0.0);
            for (std::size_t v = 0; v < m; ++v) {
                if (weights[v] == 0.0) continue;
                for (int i = 0; i < n; ++i)
                    if (vertices[v].bits[static_cast<std::size_t>(i)])
                        xi[static_cast<std::size_t>(i)] += weights[v];
            }
            auto along_slope = [&](double t) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) {
                    const int d = static_cast<int>(vertices[to].bits[static_cast<std::size_t>(i)]) -
                                  static_cast<int>(vertices[from].bits[static_cast<std::size_t>(i)]);
                    if (d == 0) continue;
                    const double arg =
                        std::clamp(xi[static_cast<std::size_t>(i)] + t * static_cast<double>(d), 0.0, cap);
                    s += psi.deriv(arg) * static_cast<double>(d);
                }
                return s;
            };
            if (along_slope(0.0) >= 0.0) continue;
            double lo = 0.0, hi = weights[from];
            if (along_slope(hi) <= 0.0) {
                lo = hi;
            } else {
                for (int b = 0; b < 100 && hi - lo > 1e-17; ++b) {
                    const double mid = 0.5 * (lo + hi);
                    if (along_slope(mid) < 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
            }
            const double step = std::min(0.5 * (lo + hi), weights[from]);
            weights[from] -= step;
            weights[to] += step;
        }
    }
    best = std::min(best, objective_of(weights));
    return best;
}

DualCertificate dual_weight_certificate(const Point& x, const PointSet& a,
                                        const HullSolution& solution) {
    double norm2 = 0.0;
    for (double t : solution.point) norm2 += t * t;
    const double norm = std::sqrt(norm2);
    if (norm <= 1e-12)
        throw std::invalid_argument("dual certificate undefined when the distance is zero");
    std::vector<double> w(solution.point.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = solution.point[i] / norm;
    WeightVector direction(std::move(w));
    const double dist = weighted_set_distance(x, a, direction);
    return {std::move(direction), dist};
}

}  // namespace conc
