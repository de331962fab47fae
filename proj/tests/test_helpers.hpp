#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "conc/mc_random.hpp"
#include "conc/verify.hpp"

namespace testutil {

using namespace conc;

inline PointSet make_set(const Alphabet& alphabet, std::vector<std::vector<int>> rows) {
    std::vector<Point> points;
    points.reserve(rows.size());
    for (auto& row : rows) points.push_back(Point{std::move(row)});
    return PointSet(alphabet, std::move(points));
}

inline ProductMeasure uniform_measure(const Alphabet& alphabet) {
    std::vector<std::vector<double>> marginals;
    for (int i = 0; i < alphabet.dimension(); ++i)
        marginals.emplace_back(static_cast<std::size_t>(alphabet.symbol_count(i)),
                               1.0 / alphabet.symbol_count(i));
    return ProductMeasure(alphabet, std::move(marginals));
}

inline PointSet full_space(const Alphabet& alphabet) {
    SpaceEnumerator en(uniform_measure(alphabet));
    std::vector<Point> points;
    points.reserve(en.size());
    for (std::uint64_t i = 0; i < en.size(); ++i) points.push_back(en.point_at(i));
    return PointSet(alphabet, std::move(points));
}

inline Scenario uniform_scenario(std::vector<int> sizes, std::vector<std::vector<int>> rows) {
    Scenario s;
    s.alphabet = Alphabet(std::move(sizes));
    s.measure = uniform_measure(s.alphabet);
    s.set = make_set(s.alphabet, std::move(rows));
    s.psi = quadratic_psi();
    s.gamma = log_inverse_gamma();
    s.t_grid = default_t_grid();
    s.p_grid = default_p_grid();
    s.checks = default_checks();
    s.digest = "test";
    return s;
}

// Random direction on the nonnegative unit sphere (or scaled inside the ball).
inline WeightVector random_weight(rng::CounterStream& cs, int n, bool unit_norm = true) {
    std::vector<double> w(static_cast<std::size_t>(n));
    double norm2 = 0.0;
    for (double& v : w) {
        const double u1 = cs.next_unit();
        const double u2 = cs.next_unit();
        v = std::abs(std::sqrt(-2.0 * std::log(1.0 - u1)) *
                     std::cos(6.283185307179586 * u2));
        norm2 += v * v;
    }
    double norm = std::sqrt(norm2);
    if (norm == 0.0) {
        w[0] = 1.0;
        norm = 1.0;
    }
    const double scale = (unit_norm ? 1.0 : cs.next_unit()) / norm;
    for (double& v : w) v *= scale;
    return WeightVector(std::move(w));
}

struct InstanceOpts {
    int min_n = 1;
    int max_n = 6;
    int max_symbols = 3;
    int min_set = 1;
    int max_set = 8;
    bool x_outside = false;
};

// Seeded (scenario, x) pair; with x_outside the draw retries until x is not
// in the set (skipping full-space draws entirely).
inline std::pair<Scenario, Point> random_instance(std::uint64_t seed, InstanceOpts o = {}) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        const std::uint64_t sub_seed = rng::mix(seed, attempt);
        Scenario s = random_scenario(
            sub_seed, ScenarioDraw{o.min_n, o.max_n, o.max_symbols, o.min_set, o.max_set});
        SpaceEnumerator en(s.measure);
        rng::CounterStream cs(rng::mix(sub_seed, 0x9e3779b9));
        Point x = en.point_at(cs.below(en.size()));
        if (o.x_outside) {
            if (s.set.size() == en.size()) continue;
            int tries = 0;
            while (s.set.contains(x) && tries < 256) {
                x = en.point_at(cs.below(en.size()));
                ++tries;
            }
            if (s.set.contains(x)) continue;
        }
        return {std::move(s), std::move(x)};
    }
}

}  // namespace testutil
