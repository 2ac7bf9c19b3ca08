#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "nfarray/fiber.hpp"
#include "nfarray/numerics.hpp"

namespace nfa {

// Validation failure; `field` is the dotted JSON path (or a comma-joined list).
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string f, const std::string& msg)
        : std::runtime_error(f + ": " + msg), field(std::move(f)) {}
};

// Inclusive range start, start + step, ..., <= stop.
struct Range {
    double start = 0, stop = 0, step = 1;
    std::vector<double> values() const;
};

// Fully resolved scenario. Lengths in metres, detunings in rad/s.
struct ScenarioConfig {
    FiberSpec fiber;
    std::string n1_source = "default";  // "default", "explicit" or "sellmeier"
    std::string species = "cesium_d2";

    // Atom distance, one of the two forms; resolved into r.
    std::optional<double> r_minus_a_nm, r_over_a;
    double r = 0;

    // Array size: a single N or a range.
    std::vector<long> N_values{1};
    bool N_is_range = false;

    // Period: explicit or as a Bragg order of the guided mode at omega0.
    std::optional<double> period_nm;
    std::optional<int> bragg_order;

    Pol polarization = Pol::X;
    std::vector<double> detunings;  // rad/s
    bool detuning_is_range = false;

    nlohmann::json run = nlohmann::json::object();
    num::ToleranceConfig tolerances;

    // Period in metres; needs the mode when given as a Bragg order.
    double period(const ModeSolution& mode) const;

    // Every resolved parameter, used for the CSV metadata block.
    nlohmann::json resolved() const;
};

ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

Pol parse_polarization(const std::string& s);

}  // namespace nfa
