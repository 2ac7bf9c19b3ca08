#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nfarray/scenario.hpp"

namespace nfa {

inline constexpr const char* kVersion = "1.0.0";

// A CSV result: column names carry units in brackets; cells are preformatted.
struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    nlohmann::json meta = nlohmann::json::object();
};

// 12 significant digits.
std::string fmt_num(double v);

enum class ScanAxis { N, Lambda, Delta };
ScanAxis parse_axis(const std::string& s);

ResultTable cmd_mode(const ScenarioConfig& cfg);
ResultTable cmd_rates(const ScenarioConfig& cfg);
ResultTable cmd_single(const ScenarioConfig& cfg);
ResultTable cmd_scan(const ScenarioConfig& cfg, ScanAxis axis);
ResultTable cmd_bandgap(const ScenarioConfig& cfg);

// Metadata block (every line '#'-prefixed), header row, data rows.
void write_csv(std::ostream& out, const std::string& command, const ScenarioConfig& cfg,
               const ResultTable& table);

// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace nfa
