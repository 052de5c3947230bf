#ifndef PETREG_CLI_HPP
#define PETREG_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "petreg/scenario.hpp"

// Command-line front end. Exit codes: 0 success, 2 schema/validation error,
// 3 infeasible bounds, 4 divergence.

namespace petreg {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitDivergence = 4;

/// Prints the communication-period bound, the per-agent sensor-period bounds,
/// admissibility verdicts for the configured periods and (when PETM-C is on)
/// the per-agent steady-state error bounds. Returns kExitInfeasible when a
/// configured period is inadmissible or the bound constants are infeasible.
int cmd_bounds(const ScenarioDocument& doc, std::ostream& os);

/// Runs the scenario and writes trajectory.csv, events.csv and metrics.json
/// into out_dir; prints a one-paragraph summary.
int cmd_run(const ScenarioDocument& doc, const std::string& out_dir, bool override_bounds,
            double tail_window, std::ostream& os);

/// One independent run per axis value; rows are computed concurrently and
/// written in input order to sweep.csv under out_dir.
int cmd_sweep(const ScenarioDocument& doc, const std::vector<std::string>& axis_paths,
              const std::vector<std::vector<double>>& values, const std::string& out_dir,
              bool override_bounds, double tail_window, std::ostream& os);

/// Full argv entry point (used by the petreg binary and by tests).
int run_main(int argc, const char* const* argv);

/// Splits "a,b,c" and "1:2,3:4" style sweep arguments.
std::vector<std::string> split_list(const std::string& text, char sep);

}  // namespace petreg

#endif  // PETREG_CLI_HPP
