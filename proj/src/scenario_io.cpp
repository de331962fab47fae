#include "conc/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "conc/mc_random.hpp"
#include "conc/util.hpp"
#include "json.hpp"

namespace conc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& message) {
    throw ScenarioError(origin + ": " + message);
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

const json& expect(const json& j, const char* key, const std::string& origin) {
    auto it = j.find(key);
    if (it == j.end()) fail(origin, std::string("missing required field '") + key + "'");
    return *it;
}

double as_number(const json& j, const std::string& origin, const std::string& what) {
    if (!j.is_number()) fail(origin, what + " must be a number");
    return j.get<double>();
}

Point parse_point(const json& j, const std::string& origin) {
    if (!j.is_array()) fail(origin, "points must be arrays of integers");
    Point p;
    for (const auto& v : j) {
        if (!v.is_number_integer()) fail(origin, "point entries must be integers");
        p.symbols.push_back(v.get<int>());
    }
    return p;
}

PointSet parse_set(const json& j, const Alphabet& alphabet, std::uint64_t cap,
                   const std::string& origin) {
    std::vector<Point> points;
    if (j.is_array()) {
        for (const auto& entry : j) points.push_back(parse_point(entry, origin));
    } else if (j.is_object()) {
        if (expect(j, "generator", origin).get<std::string>() != "random")
            fail(origin, "only the 'random' set generator is supported");
        const auto size = static_cast<std::uint64_t>(
            as_number(expect(j, "size", origin), origin, "A.size"));
        const auto seed = static_cast<std::uint64_t>(
            as_number(expect(j, "seed", origin), origin, "A.seed"));
        const std::uint64_t total = alphabet.point_count();
        if (total > cap) fail(origin, "set generator needs the space within the enumeration cap");
        if (size == 0 || size > total)
            fail(origin, "set generator size must lie in [1, |space|]");
        std::vector<std::uint64_t> strides(static_cast<std::size_t>(alphabet.dimension()), 1);
        for (int i = alphabet.dimension() - 2; i >= 0; --i)
            strides[static_cast<std::size_t>(i)] =
                strides[static_cast<std::size_t>(i + 1)] *
                static_cast<std::uint64_t>(alphabet.symbol_count(i + 1));
        rng::CounterStream cs(seed);
        std::set<std::uint64_t> indices;
        while (indices.size() < size) indices.insert(cs.below(total));
        for (std::uint64_t idx : indices) {
            Point p;
            p.symbols.resize(static_cast<std::size_t>(alphabet.dimension()));
            for (int i = 0; i < alphabet.dimension(); ++i) {
                p.symbols[static_cast<std::size_t>(i)] =
                    static_cast<int>(idx / strides[static_cast<std::size_t>(i)]);
                idx %= strides[static_cast<std::size_t>(i)];
            }
            points.push_back(std::move(p));
        }
    } else {
        fail(origin, "A must be an array of points or a generator object");
    }
    if (points.empty()) fail(origin, "A must be nonempty");
    try {
        return PointSet(alphabet, std::move(points));
    } catch (const std::exception& e) {
        fail(origin, std::string("invalid A: ") + e.what());
    }
}

std::string json_number(double v) {
    if (std::isfinite(v)) return format_double(v);
    if (std::isnan(v)) return "\"nan\"";
    return v > 0 ? "\"inf\"" : "\"-inf\"";
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf);
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path + ": cannot open scenario file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_json(buffer.str(), path);
}

Scenario parse_scenario_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ScenarioError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) +
                            ": " + e.what());
    }
    if (!j.is_object()) fail(origin, "scenario must be a JSON object");

    static const std::set<std::string> known = {
        "alphabet", "marginals", "A",  "psi",        "gamma",
        "t_grid",   "p_grid",    "mc", "recursive",  "checks",
        "tolerances", "enumeration_cap"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) fail(origin, "unknown field '" + key + "'");

    Scenario s;

    const json& ja = expect(j, "alphabet", origin);
    if (!ja.is_array() || ja.empty()) fail(origin, "alphabet must be a nonempty array");
    std::vector<int> sizes;
    for (const auto& v : ja) {
        if (!v.is_number_integer() || v.get<int>() < 1)
            fail(origin, "alphabet sizes must be positive integers");
        sizes.push_back(v.get<int>());
    }
    try {
        s.alphabet = Alphabet(sizes);
    } catch (const std::exception& e) {
        fail(origin, e.what());
    }
    const int n = s.alphabet.dimension();

    if (auto it = j.find("enumeration_cap"); it != j.end())
        s.enumeration_cap = static_cast<std::uint64_t>(
            as_number(*it, origin, "enumeration_cap"));

    std::vector<std::vector<double>> marginals;
    if (auto it = j.find("marginals"); it != j.end()) {
        if (!it->is_array() || it->size() != static_cast<std::size_t>(n))
            fail(origin, "marginals must hold one probability vector per coordinate");
        for (const auto& row : *it) {
            if (!row.is_array()) fail(origin, "each marginal must be an array");
            std::vector<double> m;
            for (const auto& v : row) m.push_back(as_number(v, origin, "marginal entry"));
            marginals.push_back(std::move(m));
        }
    } else {
        for (int i = 0; i < n; ++i)
            marginals.emplace_back(static_cast<std::size_t>(s.alphabet.symbol_count(i)),
                                   1.0 / s.alphabet.symbol_count(i));
    }
    try {
        s.measure = ProductMeasure(s.alphabet, std::move(marginals));
    } catch (const std::exception& e) {
        fail(origin, e.what());
    }
    if (s.measure.min_marginal() <= 0.0)
        fail(origin, "scenario marginals must be strictly positive");

    s.set = parse_set(expect(j, "A", origin), s.alphabet, s.enumeration_cap, origin);

    std::string psi_family = "quadratic";
    double psi_c = 1.0;
    bool psi_c_given = false;
    if (auto it = j.find("psi"); it != j.end()) {
        psi_family = expect(*it, "family", origin).get<std::string>();
        if (auto c = it->find("c"); c != it->end()) {
            psi_c = as_number(*c, origin, "psi.c");
            psi_c_given = true;
        }
    }
    if (psi_family == "quadratic") {
        s.psi = quadratic_psi();
    } else if (psi_family == "psi_c") {
        if (!psi_c_given) fail(origin, "psi family 'psi_c' needs a 'c' parameter");
        if (!(psi_c > 0.0)) fail(origin, "psi.c must be positive");
        s.psi = psi_c_spec(psi_c);
    } else {
        fail(origin, "unknown psi family '" + psi_family + "'");
    }

    std::string gamma_family = psi_family == "psi_c" ? "c_log_inv" : "log_inv";
    double gamma_c = psi_c;
    bool gamma_c_given = false;
    if (auto it = j.find("gamma"); it != j.end()) {
        gamma_family = expect(*it, "family", origin).get<std::string>();
        if (auto c = it->find("c"); c != it->end()) {
            gamma_c = as_number(*c, origin, "gamma.c");
            gamma_c_given = true;
        }
    }
    if (gamma_family == "log_inv") {
        s.gamma = log_inverse_gamma();
    } else if (gamma_family == "c_log_inv") {
        if (!(gamma_c > 0.0)) fail(origin, "gamma.c must be positive");
        s.gamma = scaled_log_inverse_gamma(gamma_c);
    } else {
        fail(origin, "unknown gamma family '" + gamma_family + "'");
    }

    s.c = psi_family == "psi_c" ? psi_c : (gamma_c_given ? gamma_c : 1.0);

    if (auto it = j.find("t_grid"); it != j.end()) {
        if (!it->is_array() || it->empty()) fail(origin, "t_grid must be a nonempty array");
        for (const auto& v : *it) s.t_grid.push_back(as_number(v, origin, "t_grid entry"));
    } else {
        s.t_grid = default_t_grid();
    }

    if (auto it = j.find("p_grid"); it != j.end()) {
        if (!it->is_array() || it->empty()) fail(origin, "p_grid must be a nonempty array");
        for (const auto& v : *it) s.p_grid.push_back(as_number(v, origin, "p_grid entry"));
    } else {
        s.p_grid = default_p_grid();
    }

    if (auto it = j.find("checks"); it != j.end()) {
        if (!it->is_array() || it->empty())
            fail(origin, "checks must select at least one check");
        for (const auto& v : *it) {
            if (!v.is_string()) fail(origin, "check names must be strings");
            s.checks.push_back(v.get<std::string>());
        }
    } else {
        s.checks = default_checks();
    }

    if (auto it = j.find("mc"); it != j.end()) {
        McConfig mc;
        mc.samples = static_cast<std::size_t>(
            as_number(expect(*it, "samples", origin), origin, "mc.samples"));
        mc.seed = static_cast<std::uint64_t>(
            as_number(expect(*it, "seed", origin), origin, "mc.seed"));
        s.mc = mc;
    }
    for (const auto& name : s.checks)
        if (name.rfind("mc_", 0) == 0 && !s.mc)
            fail(origin, "check '" + name + "' needs an mc configuration with a seed");

    if (auto it = j.find("recursive"); it != j.end()) {
        RecursiveConfig rc;
        rc.x = parse_point(expect(*it, "x", origin), origin);
        rc.m = static_cast<int>(as_number(expect(*it, "m", origin), origin, "recursive.m"));
        if (auto steps = it->find("theta_steps"); steps != it->end())
            rc.theta_steps = static_cast<int>(as_number(*steps, origin, "recursive.theta_steps"));
        s.recursive = std::move(rc);
    }

    if (auto it = j.find("tolerances"); it != j.end()) {
        if (auto v = it->find("exact"); v != it->end())
            s.tol.exact = as_number(*v, origin, "tolerances.exact");
        if (auto v = it->find("tail"); v != it->end())
            s.tol.tail = as_number(*v, origin, "tolerances.tail");
        if (auto v = it->find("base_case"); v != it->end())
            s.tol.base_case = as_number(*v, origin, "tolerances.base_case");
        if (auto v = it->find("solver_distance"); v != it->end())
            s.tol.solver_distance = as_number(*v, origin, "tolerances.solver_distance");
        if (auto v = it->find("solver_psi"); v != it->end())
            s.tol.solver_psi = as_number(*v, origin, "tolerances.solver_psi");
    }

    s.digest = scenario_digest(s);
    return s;
}

std::string scenario_digest(const Scenario& s) {
    std::ostringstream canon;
    canon << "alphabet:";
    for (int sz : s.alphabet.sizes()) canon << sz << ',';
    canon << "|marginals:";
    for (const auto& m : s.measure.marginals()) {
        for (double p : m) canon << format_double(p) << ',';
        canon << ';';
    }
    canon << "|A:";
    for (const auto& p : s.set.points()) {
        for (int v : p.symbols) canon << v << ',';
        canon << ';';
    }
    canon << "|psi:" << s.psi.label << "|c:" << format_double(s.c)
          << "|gamma:" << s.gamma.label << "|t:";
    for (double t : s.t_grid) canon << format_double(t) << ',';
    canon << "|p:";
    for (double p : s.p_grid) canon << format_double(p) << ',';
    canon << "|checks:";
    for (const auto& name : s.checks) canon << name << ',';
    if (s.mc) canon << "|mc:" << s.mc->samples << ',' << s.mc->seed;
    if (s.recursive) {
        canon << "|recursive:";
        for (int v : s.recursive->x.symbols) canon << v << ',';
        canon << 'm' << s.recursive->m << ",k" << s.recursive->theta_steps;
    }
    canon << "|cap:" << s.enumeration_cap;
    return to_hex(fnv1a64(canon.str()));
}

std::string report_to_json(const VerificationReport& report) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"scenario\": \"" << report.scenario_digest << "\",\n";
    out << "  \"overall_pass\": " << (report.overall_pass ? "true" : "false") << ",\n";
    out << "  \"checks\": [\n";
    for (std::size_t i = 0; i < report.checks.size(); ++i) {
        const CheckResult& r = report.checks[i];
        out << "    {\n";
        out << "      \"name\": \"" << r.name << "\",\n";
        if (!std::isnan(r.parameter))
            out << "      \"parameter\": " << json_number(r.parameter) << ",\n";
        out << "      \"method\": \""
            << (r.method == CheckMethod::exact ? "exact" : "monte_carlo") << "\",\n";
        out << "      \"lhs\": " << json_number(r.lhs) << ",\n";
        out << "      \"rhs\": " << json_number(r.rhs) << ",\n";
        out << "      \"margin\": " << json_number(r.margin) << ",\n";
        if (!std::isnan(r.lhs_worst))
            out << "      \"lhs_worst\": " << json_number(r.lhs_worst) << ",\n";
        if (!std::isnan(r.margin_worst))
            out << "      \"margin_worst\": " << json_number(r.margin_worst) << ",\n";
        if (!std::isnan(r.std_error))
            out << "      \"std_error\": " << json_number(r.std_error) << ",\n";
        if (r.gap_limited) out << "      \"gap_limited\": true,\n";
        if (r.advisory) out << "      \"advisory\": true,\n";
        out << "      \"pass\": " << (r.pass ? "true" : "false") << "\n";
        out << "    }" << (i + 1 < report.checks.size() ? "," : "") << "\n";
    }
    out << "  ]\n";
    out << "}\n";
    return out.str();
}

std::string report_to_csv(const VerificationReport& report) {
    std::ostringstream out;
    out << "check,parameter,method,lhs,rhs,margin,margin_worst,std_error,pass\n";
    for (const CheckResult& r : report.checks) {
        out << r.name << ',';
        if (!std::isnan(r.parameter)) out << format_double(r.parameter);
        out << ',' << (r.method == CheckMethod::exact ? "exact" : "monte_carlo") << ','
            << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
            << format_double(r.margin) << ',';
        if (!std::isnan(r.margin_worst)) out << format_double(r.margin_worst);
        out << ',';
        if (!std::isnan(r.std_error)) out << format_double(r.std_error);
        out << ',' << (r.pass ? "true" : "false") << '\n';
    }
    return out.str();
}

}  // namespace conc
