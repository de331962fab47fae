#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "conc/g_transform.hpp"
#include "conc/util.hpp"
#include "doctest.h"

using namespace conc;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed-form inverse of psi_c'(1-g) = eta, used as an independent oracle
// for the bisection path: g = c / ((1+c) e^{c eta} - 1).
double psi_c_minimizer_closed(double eta, double c) {
    return c / ((1.0 + c) * std::exp(c * eta) - 1.0);
}
}  // namespace

TEST_CASE("pointwise envelope values") {
    const GTransform quad(quadratic_psi());
    CHECK(quad.pointwise(0.7, 0.0) == 0.25);  // psi(1)
    CHECK(quad.pointwise(0.7, 1.0) == 0.7);   // psi(0) = 0
    CHECK(quad.pointwise(0.25, 0.5) == doctest::Approx(0.1875).epsilon(1e-15));
    CHECK(quad.pointwise(kInf, 0.0) == 0.25);
    CHECK(quad.pointwise(kInf, 0.5) == kInf);
    CHECK_THROWS_AS(quad.pointwise(-0.1, 0.5), std::domain_error);
}

TEST_CASE("quadratic minimizer and envelope in closed form") {
    const GTransform quad(quadratic_psi());
    CHECK(quad.minimizer(0.0) == 1.0);
    CHECK(std::abs(quad.minimizer(0.25) - 0.5) <= 1e-10);
    CHECK(quad.minimizer(0.6) == 0.0);  // past psi'(1) = 1/2
    CHECK(quad.minimizer(kInf) == 0.0);

    CHECK(quad.value(0.0) == 0.0);
    CHECK(std::abs(quad.value(0.25) - 0.1875) <= 1e-10);
    CHECK(quad.value(0.75) == 0.25);  // plateau at psi(1)
    CHECK(quad.value(kInf) == 0.25);

    // g = 1 - 2 eta and G = eta - eta^2 on the root branch
    for (double eta : linspace(0.001, 0.499, 200)) {
        CHECK(std::abs(quad.minimizer(eta) - (1.0 - 2.0 * eta)) <= 1e-10);
        CHECK(std::abs(quad.value(eta) - (eta - eta * eta)) <= 1e-10);
    }
}

TEST_CASE("psi_c minimizer matches its closed-form inverse") {
    for (double c : {0.5, 1.0, 2.0}) {
        const GTransform transform(psi_c_spec(c));
        CHECK(transform.minimizer(0.0) == 1.0);
        for (double eta : linspace(0.01, 5.0, 120)) {
            const double expected = psi_c_minimizer_closed(eta, c);
            CHECK(std::abs(transform.minimizer(eta) - expected) <= 1e-10);
        }
        // psi_c'(1) = inf: the plateau never triggers at finite eta
        CHECK(transform.minimizer(1e6) > 0.0);
        CHECK(transform.value(kInf) ==
              doctest::Approx(std::log1p(1.0 / c)).epsilon(1e-15));
    }
}

TEST_CASE("bisection residual stays small on the root branch") {
    for (double c : {0.5, 1.0, 2.0}) {
        const PsiSpec psi = psi_c_spec(c);
        const GTransform transform(psi);
        for (double eta : linspace(0.01, 3.0, 60)) {
            const double g = transform.minimizer(eta);
            CHECK(std::abs(psi.deriv(1.0 - g) - eta) <= 1e-10);
        }
    }
    const PsiSpec quad = quadratic_psi();
    const GTransform transform(quad);
    for (double eta : linspace(0.01, 0.49, 60)) {
        const double g = transform.minimizer(eta);
        CHECK(std::abs(quad.deriv(1.0 - g) - eta) <= 1e-10);
    }
}

TEST_CASE("envelope second derivative") {
    const GTransform quad(quadratic_psi());
    for (double eta : {0.1, 0.25, 0.4})
        CHECK(quad.second_derivative(eta) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK_THROWS_AS(quad.second_derivative(0.6), std::domain_error);
    CHECK_THROWS_AS(quad.second_derivative(0.0), std::domain_error);

    // psi_1 at the eta whose minimizer is one half: eta = psi_1'(0.5) = log(3/2),
    // G'' = -(0.25 + 0.5) = -0.75.
    const GTransform p1(psi_c_spec(1.0));
    const double eta_half = std::log(1.5);
    CHECK(std::abs(p1.minimizer(eta_half) - 0.5) <= 1e-10);
    CHECK(p1.second_derivative(eta_half) == doctest::Approx(-0.75).epsilon(1e-9));

    // finite differences of the envelope as the oracle
    const double h = 1e-5;
    for (double eta : {0.2, 0.5, 1.0}) {
        const double fd =
            (p1.value(eta + h) - 2.0 * p1.value(eta) + p1.value(eta - h)) / (h * h);
        CHECK(std::abs(fd - p1.second_derivative(eta)) <=
              1e-4 * std::abs(p1.second_derivative(eta)));
    }
}

TEST_CASE("envelope shape properties") {
    for (const PsiSpec& psi : {quadratic_psi(), psi_c_spec(1.0)}) {
        const GTransform transform(psi);
        const auto etas = linspace(0.0, 1.5, 1000);
        std::vector<double> values(etas.size());
        for (std::size_t i = 0; i < etas.size(); ++i) values[i] = transform.value(etas[i]);

        CHECK(values.front() == 0.0);
        CHECK(std::abs(transform.minimizer(0.0) - 1.0) <= 1e-9);
        for (std::size_t i = 1; i < values.size(); ++i) {
            CHECK(values[i] - values[i - 1] >= -1e-10);  // nondecreasing
            CHECK(values[i] <= etas[i] + 1e-12);         // G(eta) <= eta
            if (i + 1 < values.size())
                CHECK(values[i + 1] - 2.0 * values[i] + values[i - 1] <= 1e-10);  // concave
        }

        // first differences of G track the minimizer
        double prev_g = transform.minimizer(etas[1]);
        for (std::size_t i = 2; i + 1 < etas.size(); i += 37) {
            const double g = transform.minimizer(etas[i]);
            CHECK(g <= prev_g + 1e-12);  // nonincreasing
            prev_g = g;
            const double h = etas[1] - etas[0];
            const double fd = (transform.value(etas[i] + h) - transform.value(etas[i] - h)) /
                              (2.0 * h);
            if (g > 1e-6) CHECK(std::abs(fd - g) <= 1e-4 * std::max(g, 1e-3));
        }
    }
}

TEST_CASE("concavity profile certificates") {
    const auto grid = geometric_profile_grid(1.0, 81);
    SUBCASE("quadratic cost with the log rate") {
        const auto report = concavity_profile(quadratic_psi(), log_inverse_gamma(), 1.0, grid);
        CHECK(report.concave);
        CHECK(report.scale == doctest::Approx(std::exp(0.25)).epsilon(1e-12));
    }
    SUBCASE("psi_c with the scaled log rate, c >= 1") {
        for (double c : {1.0, 2.0}) {
            const auto report =
                concavity_profile(psi_c_spec(c), scaled_log_inverse_gamma(c), 1.0, grid);
            CHECK(report.concave);
        }
    }
    SUBCASE("the c = 1 profile is the straight line 2 - r") {
        const GTransform transform(psi_c_spec(1.0));
        const GammaSpec gamma = scaled_log_inverse_gamma(1.0);
        for (double r : {0.25, 0.5, 0.75, 1.0}) {
            const double profile = std::exp(transform.value(gamma.eval(r)));
            CHECK(std::abs(profile - (2.0 - r)) <= 1e-9);
        }
    }
    SUBCASE("psi_c with the scaled log rate, c < 1, is not concave") {
        const auto report =
            concavity_profile(psi_c_spec(0.5), scaled_log_inverse_gamma(0.5), 1.0, grid);
        CHECK_FALSE(report.concave);
        CHECK(report.worst_excess > 1e-4);  // a genuine bulge, not rounding noise
    }
    SUBCASE("profile end point is one") {
        const GTransform transform(quadratic_psi());
        const GammaSpec gamma = log_inverse_gamma();
        CHECK(std::exp(transform.value(gamma.eval(1.0) - gamma.eval(1.0))) == 1.0);
    }
    SUBCASE("smaller r0") {
        const auto half_grid = geometric_profile_grid(0.5, 81);
        const auto report =
            concavity_profile(quadratic_psi(), log_inverse_gamma(), 0.5, half_grid);
        CHECK(report.concave);
    }
    SUBCASE("grid validation") {
        const std::vector<double> bad{0.5, 1.5};
        CHECK_THROWS_AS(concavity_profile(quadratic_psi(), log_inverse_gamma(), 1.0, bad),
                        std::invalid_argument);
    }
}

TEST_CASE("sufficient curvature condition") {
    const auto thetas = linspace(0.01, 0.99, 99);
    SUBCASE("quadratic cost with unit curvature bound") {
        CHECK(lemma_v_condition(quadratic_psi(), 1.0, thetas).passed);
    }
    SUBCASE("psi_c with its own curvature bound holds with equality") {
        for (double c : {0.5, 1.0, 2.0}) {
            const auto report = lemma_v_condition(psi_c_spec(c), c, thetas);
            CHECK(report.passed);
            CHECK(std::abs(report.worst_margin) <= 1e-12);
        }
    }
    SUBCASE("psi_c at c = 0.5 fails against the bound 1/c") {
        const auto report = lemma_v_condition(psi_c_spec(0.5), 2.0, thetas);
        CHECK_FALSE(report.passed);
    }
}

TEST_CASE("geometric profile grid shape") {
    const auto grid = geometric_profile_grid(1.0, 41, 1e-8);
    REQUIRE(grid.size() == 41);
    CHECK(grid.front() == doctest::Approx(1e-8).epsilon(1e-12));
    CHECK(grid.back() == 1.0);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}
