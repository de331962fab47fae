#include <cmath>
#include <set>
#include <stdexcept>

#include "conc/mc_random.hpp"
#include "conc/product_space.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace conc;
using testutil::full_space;
using testutil::make_set;
using testutil::uniform_measure;

TEST_CASE("hamming pattern marks mismatching coordinates") {
    CHECK(hamming_pattern(Point{{0, 1, 2}}, Point{{0, 1, 2}}) ==
          HammingPattern{{0, 0, 0}});
    CHECK(hamming_pattern(Point{{0, 1, 2}}, Point{{1, 1, 0}}) ==
          HammingPattern{{1, 0, 1}});
    CHECK(hamming_pattern(Point{{0, 0}}, Point{{1, 1}}) == HammingPattern{{1, 1}});
    CHECK_THROWS_AS(hamming_pattern(Point{{0}}, Point{{0, 1}}), std::invalid_argument);
}

TEST_CASE("hamming pattern is symmetric and zero exactly on equal points") {
    rng::CounterStream cs(41);
    const Alphabet alphabet({3, 2, 3, 2});
    for (int rep = 0; rep < 50; ++rep) {
        Point x, y;
        for (int i = 0; i < alphabet.dimension(); ++i) {
            x.symbols.push_back(static_cast<int>(cs.below(alphabet.symbol_count(i))));
            y.symbols.push_back(static_cast<int>(cs.below(alphabet.symbol_count(i))));
        }
        const auto hxy = hamming_pattern(x, y);
        CHECK(hxy == hamming_pattern(y, x));
        CHECK((hxy.ones() == 0) == (x == y));
    }
}

TEST_CASE("weighted distance sums weights over mismatches") {
    const WeightVector w({0.5, 0.5, 0.5, 0.5});
    CHECK(weighted_distance(Point{{0, 0, 0, 0}}, Point{{1, 0, 1, 0}}, w) == 1.0);
    CHECK(weighted_distance(Point{{0, 1, 0, 1}}, Point{{0, 1, 0, 1}}, w) == 0.0);
    const WeightVector zero({0.0, 0.0, 0.0, 0.0});
    CHECK(weighted_distance(Point{{0, 0, 0, 0}}, Point{{1, 1, 1, 1}}, zero) == 0.0);
}

TEST_CASE("weight vectors reject negative entries and norms above one") {
    CHECK_THROWS_AS(WeightVector({-0.1, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(WeightVector({0.9, 0.9}), std::invalid_argument);
    CHECK_NOTHROW(WeightVector({0.6, 0.8}));  // norm exactly one
}

TEST_CASE("weighted set distance takes the best candidate") {
    const Alphabet alphabet({2, 2, 2, 2});
    const double half = 0.5;  // uniform 1/sqrt(4)
    const WeightVector uniform(std::vector<double>(4, half));

    SUBCASE("member of the set") {
        const auto a = make_set(alphabet, {{0, 0, 0, 0}, {1, 1, 0, 0}});
        CHECK(weighted_set_distance(Point{{1, 1, 0, 0}}, a, uniform) == 0.0);
    }
    SUBCASE("single candidate with k mismatches") {
        const auto a = make_set(alphabet, {{1, 1, 1, 0}});
        CHECK(weighted_set_distance(Point{{0, 0, 0, 0}}, a, uniform) ==
              doctest::Approx(3.0 * half));
    }
    SUBCASE("two candidates with disjoint mismatch sets") {
        // x differs from the first candidate in {0}, from the second in {1,2}.
        const auto a = make_set(alphabet, {{1, 0, 0, 0}, {0, 1, 1, 0}});
        const WeightVector w({0.9, 0.1, 0.2, 0.1});
        const double smaller = std::min(0.9, 0.1 + 0.2);
        CHECK(weighted_set_distance(Point{{0, 0, 0, 0}}, a, w) == doctest::Approx(smaller));
    }
    SUBCASE("empty set is an error") {
        const PointSet empty;
        CHECK_THROWS_AS(weighted_set_distance(Point{{0, 0, 0, 0}}, empty, uniform),
                        std::invalid_argument);
    }
}

TEST_CASE("set distance can only shrink when the set grows") {
    rng::CounterStream cs(57);
    const Alphabet alphabet({3, 3, 2});
    const auto space = full_space(alphabet);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<Point> small, large;
        for (const Point& p : space.points()) {
            const bool keep_small = cs.next_unit() < 0.3;
            if (keep_small) small.push_back(p);
            if (keep_small || cs.next_unit() < 0.4) large.push_back(p);
        }
        if (small.empty()) continue;
        const PointSet a(alphabet, small);
        const PointSet b(alphabet, large);
        const auto w = testutil::random_weight(cs, 3, false);
        const Point x{{static_cast<int>(cs.below(3)), static_cast<int>(cs.below(3)),
                       static_cast<int>(cs.below(2))}};
        CHECK(weighted_set_distance(x, b, w) <= weighted_set_distance(x, a, w) + 1e-12);
        // Cauchy-Schwarz cap for any admissible weights.
        CHECK(weighted_set_distance(x, a, w) <= std::sqrt(3.0) + 1e-12);
    }
}

TEST_CASE("cross sections read off the last coordinate") {
    const Alphabet alphabet({2, 2});
    SUBCASE("full space sections are full prefix spaces") {
        const auto a = full_space(alphabet);
        for (int z = 0; z < 2; ++z) CHECK(cross_section(a, z).size() == 2);
    }
    SUBCASE("diagonal set") {
        const auto a = make_set(alphabet, {{0, 0}, {1, 1}});
        const auto section = cross_section(a, 0);
        REQUIRE(section.size() == 1);
        CHECK(section.points()[0] == Point{{0}});
    }
    SUBCASE("no point ends in z") {
        const auto a = make_set(alphabet, {{0, 0}, {1, 0}});
        CHECK(cross_section(a, 1).empty());
    }
    SUBCASE("dimension one is an error") {
        const auto a = make_set(Alphabet({2}), {{0}});
        CHECK_THROWS_AS(cross_section(a, 0), std::invalid_argument);
    }
}

TEST_CASE("cross sections partition the set") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto [s, x] = testutil::random_instance(seed, {.min_n = 2, .max_set = 20});
        std::size_t total = 0;
        for (int z = 0; z < s.alphabet.symbol_count(s.alphabet.dimension() - 1); ++z)
            total += cross_section(s.set, z).size();
        CHECK(total == s.set.size());
        (void)x;
    }
}

TEST_CASE("measure of sets") {
    SUBCASE("full space has mass one") {
        const Alphabet alphabet({2, 3, 2});
        CHECK(measure_of_set(uniform_measure(alphabet), full_space(alphabet)) ==
              doctest::Approx(1.0));
    }
    SUBCASE("half of a fair coin") {
        const Alphabet alphabet({2});
        CHECK(measure_of_set(uniform_measure(alphabet), make_set(alphabet, {{0}})) == 0.5);
    }
    SUBCASE("product of marginals") {
        const Alphabet alphabet({2, 2});
        const ProductMeasure q(alphabet, {{0.3, 0.7}, {0.3, 0.7}});
        CHECK(measure_of_set(q, make_set(alphabet, {{0, 0}})) == doctest::Approx(0.09));
    }
    SUBCASE("empty set has mass zero") {
        const Alphabet alphabet({2});
        CHECK(measure_of_set(uniform_measure(alphabet), PointSet{}) == 0.0);
    }
    SUBCASE("additive over disjoint unions") {
        const Alphabet alphabet({3, 3});
        const ProductMeasure q(alphabet, {{0.2, 0.5, 0.3}, {0.1, 0.6, 0.3}});
        const auto a = make_set(alphabet, {{0, 0}, {1, 2}});
        const auto b = make_set(alphabet, {{2, 1}, {1, 1}, {0, 2}});
        const auto both = make_set(alphabet, {{0, 0}, {1, 2}, {2, 1}, {1, 1}, {0, 2}});
        CHECK(measure_of_set(q, both) ==
              doctest::Approx(measure_of_set(q, a) + measure_of_set(q, b)));
    }
}

TEST_CASE("set mass matches Monte Carlo frequency") {
    const Alphabet alphabet({3, 2, 3});
    const ProductMeasure q(alphabet, {{0.2, 0.5, 0.3}, {0.35, 0.65}, {0.1, 0.6, 0.3}});
    const auto a = make_set(alphabet, {{0, 0, 0}, {1, 1, 1}, {2, 0, 2}, {1, 0, 1}});
    const double exact = measure_of_set(q, a);

    const std::size_t samples = 200000;
    std::size_t hits = 0;
    for (std::size_t j = 0; j < samples; ++j) {
        Point p;
        for (int i = 0; i < 3; ++i) {
            const double u = rng::unit_double(99, j * 3 + static_cast<std::uint64_t>(i));
            const auto& m = q.marginal(i);
            double cum = 0.0;
            int symbol = static_cast<int>(m.size()) - 1;
            for (std::size_t k = 0; k < m.size(); ++k) {
                cum += m[k];
                if (u < cum) {
                    symbol = static_cast<int>(k);
                    break;
                }
            }
            p.symbols.push_back(symbol);
        }
        if (a.contains(p)) ++hits;
    }
    const double freq = static_cast<double>(hits) / static_cast<double>(samples);
    const double sigma = std::sqrt(exact * (1.0 - exact) / static_cast<double>(samples));
    CHECK(std::abs(freq - exact) <= 4.0 * sigma);
}

TEST_CASE("space enumeration") {
    SUBCASE("two-point space") {
        SpaceEnumerator en(uniform_measure(Alphabet({2})));
        REQUIRE(en.size() == 2);
        CHECK(en.probability_at(0) == 0.5);
        CHECK(en.probability_at(1) == 0.5);
    }
    SUBCASE("two by two uniform") {
        SpaceEnumerator en(uniform_measure(Alphabet({2, 2})));
        REQUIRE(en.size() == 4);
        for (std::uint64_t i = 0; i < 4; ++i) CHECK(en.probability_at(i) == 0.25);
    }
    SUBCASE("indices round-trip and mass sums to one for random marginals") {
        for (int rep = 0; rep < 10; ++rep) {
            const Scenario s = random_scenario(1000 + static_cast<std::uint64_t>(rep));
            SpaceEnumerator en(s.measure);
            double mass = 0.0;
            for (std::uint64_t i = 0; i < en.size(); ++i) {
                const Point p = en.point_at(i);
                CHECK(en.index_of(p) == i);
                mass += s.measure.probability(p);
            }
            CHECK(std::abs(mass - 1.0) <= 1e-9);
        }
    }
    SUBCASE("enumeration cap is enforced") {
        const Alphabet alphabet({10, 10, 10});
        CHECK_THROWS_AS(SpaceEnumerator(uniform_measure(alphabet), 999),
                        std::invalid_argument);
    }
}

TEST_CASE("construction validation") {
    CHECK_THROWS_AS(Alphabet({2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Alphabet(std::vector<int>{}), std::invalid_argument);

    const Alphabet alphabet({2, 2});
    SUBCASE("points outside the alphabet are rejected") {
        CHECK_THROWS_AS(make_set(alphabet, {{0, 5}}), std::invalid_argument);
        CHECK_THROWS_AS(make_set(alphabet, {{0}}), std::invalid_argument);
    }
    SUBCASE("point sets deduplicate and sort") {
        const auto a = make_set(alphabet, {{1, 1}, {0, 0}, {1, 1}});
        REQUIRE(a.size() == 2);
        CHECK(a.points()[0] == Point{{0, 0}});
        CHECK(a.contains(Point{{1, 1}}));
        CHECK_FALSE(a.contains(Point{{0, 1}}));
    }
    SUBCASE("marginals must be probability vectors") {
        CHECK_THROWS_AS(ProductMeasure(alphabet, {{0.5, 0.6}, {0.5, 0.5}}),
                        std::invalid_argument);
        CHECK_THROWS_AS(ProductMeasure(alphabet, {{1.2, -0.2}, {0.5, 0.5}}),
                        std::invalid_argument);
        // drift inside the tolerance is renormalized away
        const ProductMeasure q(alphabet, {{0.5 + 4e-13, 0.5}, {0.5, 0.5}});
        CHECK(q.marginal(0)[0] + q.marginal(0)[1] == doctest::Approx(1.0).epsilon(1e-15));
    }
}
