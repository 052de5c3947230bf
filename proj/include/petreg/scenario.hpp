#ifndef PETREG_SCENARIO_HPP
#define PETREG_SCENARIO_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "petreg/simulation.hpp"

// Scenario configuration document: a strict nested key-value tree that carries
// every parameter of a run. Unknown keys are rejected, matrix dimensions are
// cross-checked, and the semantic invariants (skew-symmetric leader matrix,
// spanning tree, Hurwitz closed loops) are verified before any computation.

namespace petreg {

struct FollowerEntry {
  Matrix a, b, c, d, e, f, c_m, d_m, f_m;
  Vector x0;
  Matrix k, l;
  double sigma = 1.0;
  double rho = 1.0;
};

struct ScenarioDocument {
  // graph: directed edges (from, to) between 1-based follower ids, plus the
  // followers pinned to the leader
  std::vector<std::pair<int, int>> edges;
  std::vector<int> pinned;

  Matrix leader_s;
  Vector leader_v0;

  std::vector<FollowerEntry> followers;

  // observer section
  double mu1 = 3.0, mu2 = 3.0;
  double iota_s = 2.0, gamma_s = 1.0, iota_v = 2.0, gamma_v = 1.0;
  CombineMode combine_mode = CombineMode::Or;

  // controller section
  double iota_psi = 2.0, gamma_psi = 1.0, iota_psi_bar = 0.0;
  double iota_omega = 2.0, gamma_omega = 1.0, iota_omega_bar = 0.0;
  double kappa = 30.0;
  bool petm_c = false;
  bool variant_e = false;

  // sim section
  double t_end = 30.0;
  double comm_period = 0.01;
  std::vector<double> sensor_periods;
  std::vector<double> sensor_phases;  // empty = all zero
  int substeps = 4;

  BoundParams bound_params;
};

/// Parses and validates a document; throws SchemaError naming the offending
/// key on any failure. Comments (// and /* */) are allowed in files.
ScenarioDocument parse_scenario(const nlohmann::json& j);
ScenarioDocument load_scenario_file(const std::string& path);
ScenarioDocument load_scenario_text(const std::string& text);

nlohmann::json to_json(const ScenarioDocument& doc);

Graph make_graph(const ScenarioDocument& doc);
LeaderModel make_leader(const ScenarioDocument& doc);
std::vector<FollowerModel> make_followers(const ScenarioDocument& doc);
std::vector<FollowerGains> make_gains(const ScenarioDocument& doc);
TriggerSet make_trigger_set(const ScenarioDocument& doc);
SimConfig make_sim_config(const ScenarioDocument& doc, bool override_bounds = false);

/// Convenience: full closed-loop run straight from a document.
SimResult run_document(const ScenarioDocument& doc, bool override_bounds = false);

/// Assigns a scalar parameter addressed by a sweep axis path, e.g.
/// "observer.iota_s", "controller.iota_omega_bar", "followers.sigma"
/// (all followers) or "followers[2].rho" (1-based follower index).
void apply_axis_value(ScenarioDocument& doc, const std::string& path, double value);

}  // namespace petreg

#endif  // PETREG_SCENARIO_HPP
