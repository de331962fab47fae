#pragma once

#include <stdexcept>
#include <string>

#include "conc/verify.hpp"

namespace conc {

// Configuration problems: unreadable files, malformed JSON (with line:column
// anchors), schema violations. The CLI maps these to exit code 2.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Scenario load_scenario_file(const std::string& path);
Scenario parse_scenario_json(const std::string& text, const std::string& origin);

// Stable fingerprint of a fully materialized scenario.
std::string scenario_digest(const Scenario& s);

// Reports are written by hand so every numeric field carries 17 significant
// digits (%.17g), which round-trips 64-bit floats and keeps outputs
// byte-identical across runs.
std::string report_to_json(const VerificationReport& report);
std::string report_to_csv(const VerificationReport& report);

std::string format_double(double value);

}  // namespace conc
