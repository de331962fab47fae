#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "conc/scenario_io.hpp"
#include "conc/verify.hpp"

namespace {

using namespace conc;

struct GridRange {
    std::string name;
    double start = 0, stop = 0, step = 0;
};

GridRange parse_grid(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ScenarioError("grid must look like name=start:stop:step, got '" + spec + "'");
    GridRange g;
    g.name = spec.substr(0, eq);
    const std::string rest = spec.substr(eq + 1);
    const auto c1 = rest.find(':');
    const auto c2 = rest.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ScenarioError("grid must look like name=start:stop:step, got '" + spec + "'");
    try {
        g.start = std::stod(rest.substr(0, c1));
        g.stop = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
        g.step = std::stod(rest.substr(c2 + 1));
    } catch (const std::exception&) {
        throw ScenarioError("grid bounds must be numbers in '" + spec + "'");
    }
    if (!(g.step > 0) || g.stop < g.start)
        throw ScenarioError("grid needs step > 0 and stop >= start");
    return g;
}

std::vector<double> expand_grid(const GridRange& g) {
    std::vector<double> values;
    for (double v = g.start; v <= g.stop + 1e-12 * std::max(1.0, std::abs(g.stop)); v += g.step)
        values.push_back(v);
    return values;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ScenarioError("expected a comma-separated list of numbers, got '" + csv + "'");
        }
    }
    if (values.empty()) throw ScenarioError("empty numeric list");
    return values;
}

Point parse_point_arg(const std::string& csv) {
    Point p;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            p.symbols.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ScenarioError("--x expects comma-separated integers, got '" + csv + "'");
        }
    }
    if (p.symbols.empty()) throw ScenarioError("--x is empty");
    return p;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ScenarioError(out_path + ": cannot open output file");
    out << text;
}

std::vector<std::string> split_names(const std::string& csv) {
    std::vector<std::string> names;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) names.push_back(item);
    return names;
}

struct VerifyOptions {
    std::string scenario_path;
    std::string format = "json";
    std::string out_path;
    std::string checks;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> enum_cap;
};

int run_verify(const VerifyOptions& opt) {
    Scenario s = load_scenario_file(opt.scenario_path);
    if (!opt.checks.empty()) s.checks = split_names(opt.checks);
    if (opt.enum_cap) s.enumeration_cap = *opt.enum_cap;
    if (opt.seed) {
        if (!s.mc) throw ScenarioError("--seed given but the scenario has no mc block");
        s.mc->seed = *opt.seed;
    }
    const VerificationReport report = run_checks(s, opt.jobs);
    write_output(opt.format == "csv" ? report_to_csv(report) : report_to_json(report),
                 opt.out_path);
    return report.overall_pass ? 0 : 1;
}

struct DistanceOptions {
    std::string scenario_path;
    std::string x_arg;
    std::string format = "text";
    double tol = 1e-12;
};

int run_distance(const DistanceOptions& opt) {
    Scenario s = load_scenario_file(opt.scenario_path);
    const Point x = parse_point_arg(opt.x_arg);
    if (x.dimension() != s.alphabet.dimension())
        throw ScenarioError("--x has dimension " + std::to_string(x.dimension()) +
                            ", scenario needs " + std::to_string(s.alphabet.dimension()));
    for (int i = 0; i < x.dimension(); ++i)
        if (x.symbols[static_cast<std::size_t>(i)] < 0 ||
            x.symbols[static_cast<std::size_t>(i)] >= s.alphabet.symbol_count(i))
            throw ScenarioError("--x symbol out of range at coordinate " + std::to_string(i));

    const auto dist = convex_distance(x, s.set, opt.tol);

    std::vector<PsiSpec> families = {quadratic_psi()};
    if (s.psi.label != "quadratic") families.push_back(s.psi);
    struct Row {
        std::string label;
        double value, gap;
    };
    std::vector<Row> rows;
    for (const auto& psi : families) {
        const auto f = psi_functional(x, s.set, psi, s.tol.solver_psi);
        rows.push_back({psi.label, f.value, f.solution.gap});
    }

    std::optional<DualCertificate> certificate;
    if (dist.distance > 1e-12)
        certificate = dual_weight_certificate(x, s.set, dist.solution);

    std::ostringstream out;
    if (opt.format == "json") {
        out << "{\n  \"x\": [";
        for (std::size_t i = 0; i < x.symbols.size(); ++i)
            out << (i ? "," : "") << x.symbols[i];
        out << "],\n";
        out << "  \"distance\": " << format_double(dist.distance) << ",\n";
        out << "  \"distance_gap\": " << format_double(dist.solution.gap) << ",\n";
        out << "  \"functionals\": [\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out << "    {\"psi\": \"" << rows[i].label
                << "\", \"value\": " << format_double(rows[i].value)
                << ", \"gap\": " << format_double(rows[i].gap) << "}"
                << (i + 1 < rows.size() ? "," : "") << "\n";
        }
        out << "  ]";
        if (certificate) {
            out << ",\n  \"certificate\": {\"weights\": [";
            const auto& w = certificate->direction.values();
            for (std::size_t i = 0; i < w.size(); ++i)
                out << (i ? "," : "") << format_double(w[i]);
            out << "], \"weighted_distance\": "
                << format_double(certificate->weighted_distance) << "}";
        }
        out << "\n}\n";
    } else {
        out << "D = " << format_double(dist.distance)
            << " (gap " << format_double(dist.solution.gap) << ")\n";
        for (const auto& row : rows)
            out << "F[" << row.label << "] = " << format_double(row.value) << " (gap "
                << format_double(row.gap) << ")\n";
        if (certificate) {
            out << "certificate w* = (";
            const auto& w = certificate->direction.values();
            for (std::size_t i = 0; i < w.size(); ++i)
                out << (i ? "," : "") << format_double(w[i]);
            out << ")\ncertificate d_w* = " << format_double(certificate->weighted_distance)
                << "\n";
        } else {
            out << "certificate undefined (distance is zero)\n";
        }
    }
    std::cout << out.str();
    return 0;
}

struct PsiTableOptions {
    std::string c_list = "0.5,1,2";
    int steps = 1000;
    std::string out_path;
};

int run_psi_table(const PsiTableOptions& opt) {
    if (opt.steps < 2) throw ScenarioError("--steps must be at least 2");
    const std::vector<double> cs = parse_double_list(opt.c_list);
    for (double c : cs)
        if (!(c > 0)) throw ScenarioError("psi-table needs positive c values");

    const double fd_h = 2e-5;
    std::ostringstream out;
    out << "theta,c,psi_closed,psi_series,lower_bound,second_deriv_formula,second_deriv_fd\n";
    for (double c : cs) {
        for (int i = 0; i < opt.steps; ++i) {
            const double theta = static_cast<double>(i) / static_cast<double>(opt.steps);
            const double u = 1.0 - theta;
            const double closed = psi_c_closed(theta, c);
            const double series = psi_c_series(theta, c);
            const double bound = theta * theta / (2.0 + 2.0 * c);
            const double formula =
                theta > 0.0 ? 1.0 / (theta * theta + c * theta)
                            : std::numeric_limits<double>::infinity();
            double fd = std::numeric_limits<double>::quiet_NaN();
            if (u - fd_h > 0.0 && u + fd_h < 1.0)
                fd = (psi_c_closed(u + fd_h, c) - 2.0 * psi_c_closed(u, c) +
                      psi_c_closed(u - fd_h, c)) /
                     (fd_h * fd_h);
            out << format_double(theta) << ',' << format_double(c) << ','
                << format_double(closed) << ',' << format_double(series) << ','
                << format_double(bound) << ',' << format_double(formula) << ','
                << format_double(fd) << '\n';
        }
    }
    write_output(out.str(), opt.out_path);
    return 0;
}

struct SweepOptions {
    std::string scenario_path;
    std::string grid;
    std::string out_path;
    int jobs = 1;
};

int run_sweep(const SweepOptions& opt) {
    Scenario s = load_scenario_file(opt.scenario_path);
    const GridRange grid = parse_grid(opt.grid);
    const std::vector<double> values = expand_grid(grid);

    std::ostringstream out;
    out << "parameter,lhs,rhs,margin\n";
    if (grid.name == "t") {
        Scenario sweep = s;
        sweep.t_grid = values;
        for (const CheckResult& r : check_tail_bound(sweep, opt.jobs))
            out << format_double(r.parameter) << ',' << format_double(r.lhs) << ','
                << format_double(r.rhs) << ',' << format_double(r.margin) << '\n';
    } else if (grid.name == "c") {
        for (double c : values) {
            if (!(c > 0)) throw ScenarioError("c sweep needs positive values");
            Scenario sweep = s;
            sweep.c = c;
            const CheckResult r = check_fpsic_bound(sweep, opt.jobs);
            out << format_double(c) << ',' << format_double(r.lhs) << ','
                << format_double(r.rhs) << ',' << format_double(r.margin) << '\n';
        }
    } else {
        throw ScenarioError("sweep supports grids over 't' or 'c', got '" + grid.name + "'");
    }
    write_output(out.str(), opt.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"convex-distance concentration checks on finite product spaces"};
    app.require_subcommand(1);

    VerifyOptions verify_opt;
    std::uint64_t seed_arg = 0;
    std::uint64_t cap_arg = 0;
    auto* verify = app.add_subcommand("verify", "run the configured checks for a scenario file");
    verify->add_option("--scenario", verify_opt.scenario_path, "scenario JSON file")
        ->required();
    verify->add_option("--format", verify_opt.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    verify->add_option("--out", verify_opt.out_path, "write the report here instead of stdout");
    verify->add_option("--checks", verify_opt.checks, "comma-separated check override");
    verify->add_option("--jobs", verify_opt.jobs, "worker threads for enumeration")
        ->check(CLI::PositiveNumber);
    auto* seed_flag = verify->add_option("--seed", seed_arg, "override the Monte Carlo seed");
    auto* cap_flag = verify->add_option("--enum-cap", cap_arg, "override the enumeration cap");

    DistanceOptions distance_opt;
    auto* distance = app.add_subcommand("distance",
                                        "convex distance, functionals and dual certificate");
    distance->add_option("--scenario", distance_opt.scenario_path, "scenario JSON file")
        ->required();
    distance->add_option("--x", distance_opt.x_arg, "point, e.g. \"0,1,2\"")->required();
    distance->add_option("--format", distance_opt.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    distance->add_option("--tol", distance_opt.tol, "duality-gap target")
        ->check(CLI::PositiveNumber);

    PsiTableOptions table_opt;
    auto* table = app.add_subcommand("psi-table", "tabulate the psi_c family");
    table->add_option("--c", table_opt.c_list, "comma-separated c values");
    table->add_option("--steps", table_opt.steps, "rows per c over theta in [0,1)");
    table->add_option("--out", table_opt.out_path, "write the table here instead of stdout");

    SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "lhs/rhs curves over a parameter grid");
    sweep->add_option("--scenario", sweep_opt.scenario_path, "scenario JSON file")->required();
    sweep->add_option("--grid", sweep_opt.grid, "grid spec, e.g. t=0:3:0.25 or c=0.5:2:0.5")
        ->required();
    sweep->add_option("--out", sweep_opt.out_path, "write the table here instead of stdout");
    sweep->add_option("--jobs", sweep_opt.jobs, "worker threads for enumeration")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*verify) {
            if (*seed_flag) verify_opt.seed = seed_arg;
            if (*cap_flag) verify_opt.enum_cap = cap_arg;
            return run_verify(verify_opt);
        }
        if (*distance) return run_distance(distance_opt);
        if (*table) return run_psi_table(table_opt);
        if (*sweep) return run_sweep(sweep_opt);
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
