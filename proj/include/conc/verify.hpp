#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conc/g_transform.hpp"
#include "conc/hull.hpp"
#include "conc/product_space.hpp"
#include "conc/psi.hpp"

namespace conc {

enum class CheckMethod { exact, monte_carlo };

// One named inequality evaluation. For checks built on solver values the
// nominal lhs uses the certified objectives as returned; lhs_worst adds each
// point's duality gap back in, so margin_worst is a bound that no solver
// tolerance can be hiding behind. gap_limited marks the opposite situation:
// the nominal margin failed but a gap-lowered lhs would pass, i.e. the
// violation is attributable to solver tolerance rather than mathematics.
struct CheckResult {
    std::string name;
    double parameter = std::numeric_limits<double>::quiet_NaN();
    CheckMethod method = CheckMethod::exact;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double lhs_worst = std::numeric_limits<double>::quiet_NaN();
    double margin_worst = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();  // Monte Carlo only
    bool pass = false;
    bool gap_limited = false;
    bool advisory = false;
};

struct VerificationReport {
    std::string scenario_digest;
    std::vector<CheckResult> checks;
    bool overall_pass = true;
};

struct McConfig {
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

struct RecursiveConfig {
    Point x;              // the evaluation point; its last symbol is the section z
    int m = 0;            // companion section symbol
    int theta_steps = 11;
};

struct ToleranceProfile {
    double exact = 1e-9;            // margin tolerance for expectation checks
    double tail = 1e-12;            // margin tolerance for the tail bound
    double base_case = 1e-12;
    double solver_distance = 1e-12;  // duality-gap target for distance solves
    double solver_psi = 1e-10;       // duality-gap target for functional solves
};

struct Scenario {
    Alphabet alphabet;
    ProductMeasure measure;
    PointSet set;  // A, nonempty
    PsiSpec psi;
    double c = 1.0;  // parameter for the psi_c-based checks
    GammaSpec gamma;
    std::vector<double> t_grid;
    std::vector<double> p_grid;
    std::vector<std::string> checks;
    ToleranceProfile tol;
    std::optional<McConfig> mc;
    std::optional<RecursiveConfig> recursive;
    std::uint64_t enumeration_cap = kDefaultEnumerationCap;
    std::string digest;
};

std::vector<double> default_t_grid();  // 0, 0.25, ..., 3
std::vector<double> default_p_grid();  // 0.01, ..., 0.99
std::vector<std::string> default_checks();

// sum_x Q(x) f(x) over the whole space, chunked compensated summation.
// Results are identical for any jobs value.
double exact_expectation(const ProductMeasure& q, const std::function<double(const Point&)>& f,
                         std::uint64_t cap = kDefaultEnumerationCap, int jobs = 1);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};
// Mean of f over `samples` draws from q using the counter-based generator;
// deterministic for a fixed seed.
McEstimate mc_expectation(const ProductMeasure& q, const std::function<double(const Point&)>& f,
                          std::size_t samples, std::uint64_t seed);

// P(A) * P{ D(X,A) >= t } <= exp(-t^2/4), one result per t in the grid.
std::vector<CheckResult> check_tail_bound(const Scenario& s, int jobs = 1);

// P(A) * E exp(D(X,A)^2/4) <= 1.
CheckResult check_exp_moment(const Scenario& s, int jobs = 1);

// P(A)^c * E exp(F_{psi_c}(X,A)) <= 1 with c = s.c.
CheckResult check_fpsic_bound(const Scenario& s, int jobs = 1);

// E exp(F_psi(X,A)) <= exp(gamma(P(A))) for the scenario's (psi, gamma) pair.
CheckResult check_theorem_bound(const Scenario& s, int jobs = 1);

// (1-p) e^{psi(1)} + p <= e^{gamma(p)} over the p grid.
std::vector<CheckResult> check_base_case(const PsiSpec& psi, const GammaSpec& gamma,
                                         std::span<const double> p_grid, double tolerance = 1e-12);

// gamma'(1) e^{gamma(1)} <= 1 - e^{psi(1)}; informational when the direct
// base-case grid passes.
CheckResult check_remark2_sufficient(const PsiSpec& psi, const GammaSpec& gamma);

// F_n(x,A) <= theta F_{n-1}(w,A_z) + (1-theta) F_{n-1}(w,A_m) + psi(1-theta)
// across a theta grid, with x = (w, z). Both cross-sections must be nonempty.
std::vector<CheckResult> check_recursive_bound(const Scenario& s, int jobs = 1);

// Monte Carlo counterparts of the expectation checks (P(A) stays exact; only
// the expectation is sampled). Pass uses estimate - 4 standard errors.
CheckResult check_exp_moment_mc(const Scenario& s);
CheckResult check_fpsic_bound_mc(const Scenario& s);

// Runs s.checks in order and aggregates the overall verdict. A failed
// remark2_sufficient is downgraded to advisory when the direct base-case
// grid passed in the same run.
VerificationReport run_checks(const Scenario& s, int jobs = 1);

// Seeded scenario generator for verification suites: alphabet sizes in
// [2, max_symbols], Dirichlet-like strictly positive marginals, A a uniform
// random subset of fixed cardinality.
struct ScenarioDraw {
    int min_n = 1;
    int max_n = 6;
    int max_symbols = 3;
    int min_set = 1;
    int max_set = 25;
};
Scenario random_scenario(std::uint64_t seed, const ScenarioDraw& draw = {});

}  // namespace conc
