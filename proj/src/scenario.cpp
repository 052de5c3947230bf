#include "petreg/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace petreg {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& path) {
  if (!j.is_object()) throw SchemaError("expected an object", path);
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw SchemaError("unknown key '" + key + "'", path);
}

const json& require_key(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw SchemaError("missing key '" + key + "'", path);
  return j.at(key);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError("expected a number", path);
  return j.get<double>();
}

double positive_number(const json& j, const std::string& path) {
  const double v = as_number(j, path);
  if (!(v > 0.0)) throw SchemaError("expected a positive number", path);
  return v;
}

double non_negative_number(const json& j, const std::string& path) {
  const double v = as_number(j, path);
  if (v < 0.0) throw SchemaError("expected a non-negative number", path);
  return v;
}

Matrix as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError("expected a non-empty array of rows", path);
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
    throw SchemaError("expected rows to be non-empty arrays", path);
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw SchemaError("ragged matrix rows", path);
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = as_number(j[r][c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

Vector as_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError("expected a non-empty array", path);
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(i) = as_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

std::vector<double> as_number_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError("expected an array of numbers", path);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void semantic_checks(const ScenarioDocument& doc) {
  const int n = static_cast<int>(doc.followers.size());
  const int nv = static_cast<int>(doc.leader_s.rows());

  if (!check_neutral_stability(doc.leader_s))
    throw SchemaError("leader matrix must be skew-symmetric", "leader.s");
  if (doc.leader_v0.size() != nv)
    throw SchemaError("v0 length must match the leader matrix", "leader.v0");

  for (int i = 0; i < n; ++i) {
    const std::string path = "followers[" + std::to_string(i + 1) + "]";
    const auto& fe = doc.followers[i];
    FollowerModel model{fe.a, fe.b, fe.c, fe.d, fe.e, fe.f, fe.c_m, fe.d_m, fe.f_m, fe.x0};
    try {
      model.validate(nv);
    } catch (const std::invalid_argument& ex) {
      throw SchemaError(ex.what(), path);
    }
    if (fe.k.rows() != model.input_dim() || fe.k.cols() != model.state_dim())
      throw SchemaError("K must be n_u x n", path + ".k");
    if (fe.l.rows() != model.state_dim() || fe.l.cols() != model.output_dim())
      throw SchemaError("L must be n x n_y", path + ".l");
    if (!is_hurwitz(Matrix(fe.a + fe.b * fe.k)))
      throw SchemaError("a + b*k must be Hurwitz", path + ".k");
    if (!is_hurwitz(Matrix(fe.a + fe.l * fe.c_m)))
      throw SchemaError("a + l*c_m must be Hurwitz", path + ".l");
  }

  Graph g;
  try {
    g = make_graph(doc);
  } catch (const std::invalid_argument& ex) {
    throw SchemaError(ex.what(), "graph");
  }
  if (!check_spanning_tree(g))
    throw SchemaError("graph has no directed spanning tree rooted at the leader", "graph");

  if (static_cast<int>(doc.sensor_periods.size()) != n)
    throw SchemaError("one sensor period per follower required", "sim.sensor_periods");
  if (!doc.sensor_phases.empty() && static_cast<int>(doc.sensor_phases.size()) != n)
    throw SchemaError("phase list length must match follower count", "sim.sensor_phases");
  for (double p : doc.sensor_periods)
    if (!(p > 0.0)) throw SchemaError("sensor periods must be positive", "sim.sensor_periods");
  for (double p : doc.sensor_phases)
    if (p < 0.0) throw SchemaError("phases must be non-negative", "sim.sensor_phases");
  if (doc.substeps < 1) throw SchemaError("substeps must be >= 1", "sim.substeps");
}

}  // namespace

ScenarioDocument parse_scenario(const json& j) {
  ScenarioDocument doc;
  reject_unknown_keys(j, {"graph", "leader", "followers", "observer", "controller", "sim",
                          "bound_params"},
                      "<root>");

  const json& graph = require_key(j, "graph", "<root>");
  reject_unknown_keys(graph, {"edges", "pinned"}, "graph");
  const json& edges = require_key(graph, "edges", "graph");
  if (!edges.is_array()) throw SchemaError("expected an array of [from, to] pairs", "graph.edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = "graph.edges[" + std::to_string(i) + "]";
    if (!edges[i].is_array() || edges[i].size() != 2)
      throw SchemaError("expected a [from, to] pair", path);
    if (!edges[i][0].is_number_integer() || !edges[i][1].is_number_integer())
      throw SchemaError("edge endpoints must be integers", path);
    doc.edges.emplace_back(edges[i][0].get<int>(), edges[i][1].get<int>());
  }
  const json& pinned = require_key(graph, "pinned", "graph");
  if (!pinned.is_array() || pinned.empty())
    throw SchemaError("expected a non-empty list of follower ids", "graph.pinned");
  for (std::size_t i = 0; i < pinned.size(); ++i) {
    if (!pinned[i].is_number_integer())
      throw SchemaError("pinned ids must be integers", "graph.pinned");
    doc.pinned.push_back(pinned[i].get<int>());
  }

  const json& leader = require_key(j, "leader", "<root>");
  reject_unknown_keys(leader, {"s", "v0"}, "leader");
  doc.leader_s = as_matrix(require_key(leader, "s", "leader"), "leader.s");
  doc.leader_v0 = as_vector(require_key(leader, "v0", "leader"), "leader.v0");

  const json& followers = require_key(j, "followers", "<root>");
  if (!followers.is_array() || followers.empty())
    throw SchemaError("expected a non-empty array", "followers");
  for (std::size_t i = 0; i < followers.size(); ++i) {
    const std::string path = "followers[" + std::to_string(i + 1) + "]";
    const json& fj = followers[i];
    reject_unknown_keys(fj, {"a", "b", "c", "d", "e", "f", "c_m", "d_m", "f_m", "x0", "k", "l",
                             "sigma", "rho"},
                        path);
    FollowerEntry fe;
    fe.a = as_matrix(require_key(fj, "a", path), path + ".a");
    fe.b = as_matrix(require_key(fj, "b", path), path + ".b");
    fe.c = as_matrix(require_key(fj, "c", path), path + ".c");
    fe.d = as_matrix(require_key(fj, "d", path), path + ".d");
    fe.e = as_matrix(require_key(fj, "e", path), path + ".e");
    fe.f = as_matrix(require_key(fj, "f", path), path + ".f");
    fe.c_m = as_matrix(require_key(fj, "c_m", path), path + ".c_m");
    fe.d_m = as_matrix(require_key(fj, "d_m", path), path + ".d_m");
    fe.f_m = as_matrix(require_key(fj, "f_m", path), path + ".f_m");
    fe.x0 = as_vector(require_key(fj, "x0", path), path + ".x0");
    fe.k = as_matrix(require_key(fj, "k", path), path + ".k");
    fe.l = as_matrix(require_key(fj, "l", path), path + ".l");
    fe.sigma = non_negative_number(require_key(fj, "sigma", path), path + ".sigma");
    fe.rho = non_negative_number(require_key(fj, "rho", path), path + ".rho");
    doc.followers.push_back(std::move(fe));
  }

  const json& obs = require_key(j, "observer", "<root>");
  reject_unknown_keys(obs, {"mu1", "mu2", "iota_s", "gamma_s", "iota_v", "gamma_v",
                            "combine_mode"},
                      "observer");
  doc.mu1 = positive_number(require_key(obs, "mu1", "observer"), "observer.mu1");
  doc.mu2 = positive_number(require_key(obs, "mu2", "observer"), "observer.mu2");
  doc.iota_s = positive_number(require_key(obs, "iota_s", "observer"), "observer.iota_s");
  doc.gamma_s = positive_number(require_key(obs, "gamma_s", "observer"), "observer.gamma_s");
  doc.iota_v = positive_number(require_key(obs, "iota_v", "observer"), "observer.iota_v");
  doc.gamma_v = positive_number(require_key(obs, "gamma_v", "observer"), "observer.gamma_v");
  const json& mode = require_key(obs, "combine_mode", "observer");
  if (!mode.is_string() || (mode != "and" && mode != "or"))
    throw SchemaError("combine_mode must be \"and\" or \"or\"", "observer.combine_mode");
  doc.combine_mode = mode == "and" ? CombineMode::And : CombineMode::Or;

  const json& ctl = require_key(j, "controller", "<root>");
  reject_unknown_keys(ctl, {"iota_psi", "gamma_psi", "iota_psi_bar", "iota_omega", "gamma_omega",
                            "iota_omega_bar", "kappa", "petm_c", "variant_e"},
                      "controller");
  doc.iota_psi = non_negative_number(require_key(ctl, "iota_psi", "controller"),
                                     "controller.iota_psi");
  doc.gamma_psi = non_negative_number(require_key(ctl, "gamma_psi", "controller"),
                                      "controller.gamma_psi");
  doc.iota_psi_bar = non_negative_number(require_key(ctl, "iota_psi_bar", "controller"),
                                         "controller.iota_psi_bar");
  doc.iota_omega = non_negative_number(require_key(ctl, "iota_omega", "controller"),
                                       "controller.iota_omega");
  doc.gamma_omega = non_negative_number(require_key(ctl, "gamma_omega", "controller"),
                                        "controller.gamma_omega");
  doc.iota_omega_bar = non_negative_number(require_key(ctl, "iota_omega_bar", "controller"),
                                           "controller.iota_omega_bar");
  doc.kappa = positive_number(require_key(ctl, "kappa", "controller"), "controller.kappa");
  const json& petm_c = require_key(ctl, "petm_c", "controller");
  if (!petm_c.is_boolean()) throw SchemaError("expected a boolean", "controller.petm_c");
  doc.petm_c = petm_c.get<bool>();
  if (ctl.contains("variant_e")) {
    if (!ctl.at("variant_e").is_boolean())
      throw SchemaError("expected a boolean", "controller.variant_e");
    doc.variant_e = ctl.at("variant_e").get<bool>();
  }

  const json& sim = require_key(j, "sim", "<root>");
  reject_unknown_keys(sim, {"t_end", "comm_period", "sensor_periods", "sensor_phases",
                            "substeps"},
                      "sim");
  doc.t_end = positive_number(require_key(sim, "t_end", "sim"), "sim.t_end");
  doc.comm_period = positive_number(require_key(sim, "comm_period", "sim"), "sim.comm_period");
  doc.sensor_periods =
      as_number_list(require_key(sim, "sensor_periods", "sim"), "sim.sensor_periods");
  if (sim.contains("sensor_phases"))
    doc.sensor_phases = as_number_list(sim.at("sensor_phases"), "sim.sensor_phases");
  const json& substeps = require_key(sim, "substeps", "sim");
  if (!substeps.is_number_integer()) throw SchemaError("expected an integer", "sim.substeps");
  doc.substeps = substeps.get<int>();

  const json& bp = require_key(j, "bound_params", "<root>");
  reject_unknown_keys(bp, {"zeta1", "zeta2", "zeta3", "epsilon"}, "bound_params");
  doc.bound_params.zeta1 =
      positive_number(require_key(bp, "zeta1", "bound_params"), "bound_params.zeta1");
  doc.bound_params.zeta2 =
      non_negative_number(require_key(bp, "zeta2", "bound_params"), "bound_params.zeta2");
  doc.bound_params.zeta3 =
      positive_number(require_key(bp, "zeta3", "bound_params"), "bound_params.zeta3");
  doc.bound_params.epsilon =
      positive_number(require_key(bp, "epsilon", "bound_params"), "bound_params.epsilon");

  semantic_checks(doc);
  return doc;
}

ScenarioDocument load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file", path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& ex) {
    throw SchemaError(std::string("JSON parse error: ") + ex.what(), path);
  }
  return parse_scenario(j);
}

ScenarioDocument load_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& ex) {
    throw SchemaError(std::string("JSON parse error: ") + ex.what(), "<text>");
  }
  return parse_scenario(j);
}

nlohmann::json to_json(const ScenarioDocument& doc) {
  json j;
  json edges = json::array();
  for (const auto& [from, to] : doc.edges) edges.push_back(json::array({from, to}));
  j["graph"] = {{"edges", edges}, {"pinned", doc.pinned}};
  j["leader"] = {{"s", matrix_to_json(doc.leader_s)}, {"v0", vector_to_json(doc.leader_v0)}};
  j["followers"] = json::array();
  for (const auto& fe : doc.followers) {
    j["followers"].push_back({{"a", matrix_to_json(fe.a)},
                              {"b", matrix_to_json(fe.b)},
                              {"c", matrix_to_json(fe.c)},
                              {"d", matrix_to_json(fe.d)},
                              {"e", matrix_to_json(fe.e)},
                              {"f", matrix_to_json(fe.f)},
                              {"c_m", matrix_to_json(fe.c_m)},
                              {"d_m", matrix_to_json(fe.d_m)},
                              {"f_m", matrix_to_json(fe.f_m)},
                              {"x0", vector_to_json(fe.x0)},
                              {"k", matrix_to_json(fe.k)},
                              {"l", matrix_to_json(fe.l)},
                              {"sigma", fe.sigma},
                              {"rho", fe.rho}});
  }
  j["observer"] = {{"mu1", doc.mu1},
                   {"mu2", doc.mu2},
                   {"iota_s", doc.iota_s},
                   {"gamma_s", doc.gamma_s},
                   {"iota_v", doc.iota_v},
                   {"gamma_v", doc.gamma_v},
                   {"combine_mode", doc.combine_mode == CombineMode::And ? "and" : "or"}};
  j["controller"] = {{"iota_psi", doc.iota_psi},
                     {"gamma_psi", doc.gamma_psi},
                     {"iota_psi_bar", doc.iota_psi_bar},
                     {"iota_omega", doc.iota_omega},
                     {"gamma_omega", doc.gamma_omega},
                     {"iota_omega_bar", doc.iota_omega_bar},
                     {"kappa", doc.kappa},
                     {"petm_c", doc.petm_c},
                     {"variant_e", doc.variant_e}};
  j["sim"] = {{"t_end", doc.t_end},
              {"comm_period", doc.comm_period},
              {"sensor_periods", doc.sensor_periods},
              {"substeps", doc.substeps}};
  if (!doc.sensor_phases.empty()) j["sim"]["sensor_phases"] = doc.sensor_phases;
  j["bound_params"] = {{"zeta1", doc.bound_params.zeta1},
                       {"zeta2", doc.bound_params.zeta2},
                       {"zeta3", doc.bound_params.zeta3},
                       {"epsilon", doc.bound_params.epsilon}};
  return j;
}

Graph make_graph(const ScenarioDocument& doc) {
  const int n = static_cast<int>(doc.followers.size());
  Graph g;
  g.adjacency = Matrix::Zero(n, n);
  g.pinning = Vector::Zero(n);
  for (const auto& [from, to] : doc.edges) {
    if (from < 1 || from > n || to < 1 || to > n)
      throw std::invalid_argument("graph edge references an unknown follower id");
    g.adjacency(to - 1, from - 1) = 1.0;  // 'to' receives from 'from'
  }
  for (int id : doc.pinned) {
    if (id < 1 || id > n)
      throw std::invalid_argument("pinned list references an unknown follower id");
    g.pinning(id - 1) = 1.0;
  }
  g.validate();
  return g;
}

LeaderModel make_leader(const ScenarioDocument& doc) {
  LeaderModel m{doc.leader_s, doc.leader_v0};
  m.validate();
  return m;
}

std::vector<FollowerModel> make_followers(const ScenarioDocument& doc) {
  std::vector<FollowerModel> out;
  for (const auto& fe : doc.followers)
    out.push_back(FollowerModel{fe.a, fe.b, fe.c, fe.d, fe.e, fe.f, fe.c_m, fe.d_m, fe.f_m,
                                fe.x0});
  return out;
}

std::vector<FollowerGains> make_gains(const ScenarioDocument& doc) {
  std::vector<FollowerGains> out;
  for (const auto& fe : doc.followers) out.push_back(FollowerGains{fe.k, fe.l});
  return out;
}

TriggerSet make_trigger_set(const ScenarioDocument& doc) {
  TriggerSet ts;
  ts.mu1 = doc.mu1;
  ts.mu2 = doc.mu2;
  ts.kappa = doc.kappa;
  ts.petm_a = PetmAConfig{doc.iota_s, doc.gamma_s, doc.iota_v, doc.gamma_v, doc.combine_mode};
  for (const auto& fe : doc.followers) {
    TriggerConfig tc;
    tc.iota_psi = doc.iota_psi;
    tc.gamma_psi = doc.gamma_psi;
    tc.iota_psi_bar = doc.iota_psi_bar;
    tc.iota_omega = doc.iota_omega;
    tc.gamma_omega = doc.gamma_omega;
    tc.iota_omega_bar = doc.iota_omega_bar;
    tc.sigma = fe.sigma;
    tc.rho = fe.rho;
    tc.petm_c_enabled = doc.petm_c;
    tc.variant_e = doc.variant_e;
    ts.agent.push_back(tc);
  }
  return ts;
}

SimConfig make_sim_config(const ScenarioDocument& doc, bool override_bounds) {
  SimConfig cfg;
  cfg.t_end = doc.t_end;
  cfg.comm_period = doc.comm_period;
  cfg.sensor_periods = doc.sensor_periods;
  cfg.sensor_phases = doc.sensor_phases;
  cfg.integrator_substeps = doc.substeps;
  cfg.override_bounds = override_bounds;
  return cfg;
}

SimResult run_document(const ScenarioDocument& doc, bool override_bounds) {
  return run_scenario(make_sim_config(doc, override_bounds), make_graph(doc), make_leader(doc),
                      make_followers(doc), make_gains(doc), make_trigger_set(doc));
}

void apply_axis_value(ScenarioDocument& doc, const std::string& path, double value) {
  auto set_follower_field = [&](FollowerEntry& fe, const std::string& field) {
    if (field == "sigma")
      fe.sigma = value;
    else if (field == "rho")
      fe.rho = value;
    else
      throw std::invalid_argument("unknown axis path: " + path);
  };

  if (path.rfind("followers[", 0) == 0) {
    const auto close = path.find(']');
    if (close == std::string::npos || close + 1 >= path.size() || path[close + 1] != '.')
      throw std::invalid_argument("unknown axis path: " + path);
    const int id = std::stoi(path.substr(10, close - 10));
    if (id < 1 || id > static_cast<int>(doc.followers.size()))
      throw std::invalid_argument("axis path references an unknown follower: " + path);
    set_follower_field(doc.followers[id - 1], path.substr(close + 2));
    return;
  }
  if (path.rfind("followers.", 0) == 0) {
    for (auto& fe : doc.followers) set_follower_field(fe, path.substr(10));
    return;
  }

  if (path == "observer.mu1") doc.mu1 = value;
  else if (path == "observer.mu2") doc.mu2 = value;
  else if (path == "observer.iota_s") doc.iota_s = value;
  else if (path == "observer.gamma_s") doc.gamma_s = value;
  else if (path == "observer.iota_v") doc.iota_v = value;
  else if (path == "observer.gamma_v") doc.gamma_v = value;
  else if (path == "controller.iota_psi") doc.iota_psi = value;
  else if (path == "controller.gamma_psi") doc.gamma_psi = value;
  else if (path == "controller.iota_psi_bar") doc.iota_psi_bar = value;
  else if (path == "controller.iota_omega") doc.iota_omega = value;
  else if (path == "controller.gamma_omega") doc.gamma_omega = value;
  else if (path == "controller.iota_omega_bar") doc.iota_omega_bar = value;
  else if (path == "controller.kappa") doc.kappa = value;
  else if (path == "sim.t_end") doc.t_end = value;
  else if (path == "sim.comm_period") doc.comm_period = value;
  else if (path == "bound_params.zeta1") doc.bound_params.zeta1 = value;
  else if (path == "bound_params.zeta2") doc.bound_params.zeta2 = value;
  else if (path == "bound_params.zeta3") doc.bound_params.zeta3 = value;
  else if (path == "bound_params.epsilon") doc.bound_params.epsilon = value;
  else throw std::invalid_argument("unknown axis path: " + path);
}

}  // namespace petreg
