#include "petreg/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "petreg/metrics.hpp"

namespace petreg {

namespace {

struct SweepRow {
  Metrics metrics;
  std::string error;  // non-empty when the run failed
};

int map_exception_to_exit(const std::exception& ex, std::ostream& os) {
  os << "error: " << ex.what() << '\n';
  if (dynamic_cast<const SchemaError*>(&ex)) return kExitSchema;
  if (dynamic_cast<const InfeasibleParametersError*>(&ex)) return kExitInfeasible;
  if (dynamic_cast<const DivergenceError*>(&ex)) return kExitDivergence;
  return kExitSchema;
}

}  // namespace

int cmd_bounds(const ScenarioDocument& doc, std::ostream& os) {
  bool all_admissible = true;
  const Graph g = make_graph(doc);
  const auto followers = make_followers(doc);
  const auto gains = make_gains(doc);
  const auto triggers = make_trigger_set(doc);

  const double t_bound = observer_period_bound(g, doc.mu1, doc.mu2);
  os << "communication period bound: " << t_bound << " s\n";
  os << "  configured comm_period " << doc.comm_period << ": "
     << (doc.comm_period < t_bound ? "admissible" : "NOT admissible") << '\n';
  all_admissible = all_admissible && doc.comm_period < t_bound;

  const auto mode = doc.petm_c ? SensorPeriodMode::C : SensorPeriodMode::B;
  for (std::size_t i = 0; i < followers.size(); ++i) {
    const double s_bound = sensor_period_bound(followers[i], gains[i].k, gains[i].l, mode);
    const double configured = doc.sensor_periods[i];
    os << "agent " << i + 1 << " sensor period bound (mode " << (doc.petm_c ? 'C' : 'B')
       << "): " << s_bound << " s\n";
    os << "  configured period " << configured << ": "
       << (configured < s_bound ? "admissible" : "NOT admissible") << '\n';
    all_admissible = all_admissible && configured < s_bound;
  }

  if (doc.petm_c) {
    double worst = 0.0;
    bool feasible = true;
    for (std::size_t i = 0; i < followers.size(); ++i) {
      try {
        const RegulatorSolution sol = solve_regulator_direct(followers[i], doc.leader_s);
        const double phi8 =
            steady_error_bound(followers[i], gains[i].k, gains[i].l, sol.u_sol,
                               triggers.agent[i], doc.bound_params, doc.sensor_periods[i]);
        os << "agent " << i + 1 << " steady-state error bound: " << phi8 << '\n';
        worst = std::max(worst, phi8);
      } catch (const InfeasibleParametersError& ex) {
        os << "agent " << i + 1 << " steady-state error bound: infeasible -- " << ex.what()
           << '\n';
        feasible = false;
      }
    }
    if (feasible)
      os << "max steady-state error bound: " << worst << '\n';
    else
      all_admissible = false;
  }
  return all_admissible ? kExitOk : kExitInfeasible;
}

int cmd_run(const ScenarioDocument& doc, const std::string& out_dir, bool override_bounds,
            double tail_window, std::ostream& os) {
  try {
    std::filesystem::create_directories(out_dir);
    if (override_bounds) {
      const double t_bound = observer_period_bound(make_graph(doc), doc.mu1, doc.mu2);
      if (doc.comm_period >= t_bound)
        os << "warning: comm_period " << doc.comm_period
           << " violates the admissible bound " << t_bound << '\n';
      const auto followers = make_followers(doc);
      const auto gains = make_gains(doc);
      const auto mode = doc.petm_c ? SensorPeriodMode::C : SensorPeriodMode::B;
      for (std::size_t i = 0; i < followers.size(); ++i) {
        const double s_bound = sensor_period_bound(followers[i], gains[i].k, gains[i].l, mode);
        if (doc.sensor_periods[i] >= s_bound)
          os << "warning: sensor period for agent " << i + 1
             << " violates the admissible bound " << s_bound << '\n';
      }
    }
    const SimResult result = run_document(doc, override_bounds);
    const Metrics metrics = compute_metrics(result.trajectory, result.events, tail_window);

    {
      std::ofstream f(out_dir + "/trajectory.csv");
      write_trajectory_csv(result.trajectory, f);
    }
    {
      std::ofstream f(out_dir + "/events.csv");
      write_events_csv(result.events, f);
    }
    {
      std::ofstream f(out_dir + "/metrics.json");
      write_metrics_json(metrics, f);
    }

    os << "tail error (" << tail_window << " s window): " << metrics.tail_error << '\n';
    os << "observer tail errors: S " << metrics.tail_s_error << ", v " << metrics.tail_v_error
       << '\n';
    for (const auto& [name, cm] : metrics.channels) {
      os << name << ": count " << cm.count << ", min gap " << cm.min_gap << " s, mean gap "
         << cm.mean_gap << " s\n";
    }
    os << "inter-event gaps are period multiples: "
       << (metrics.multiples_of_period ? "true" : "false") << '\n';
    return kExitOk;
  } catch (const std::exception& ex) {
    return map_exception_to_exit(ex, os);
  }
}

int cmd_sweep(const ScenarioDocument& doc, const std::vector<std::string>& axis_paths,
              const std::vector<std::vector<double>>& values, const std::string& out_dir,
              bool override_bounds, double tail_window, std::ostream& os) {
  try {
    if (axis_paths.empty()) throw std::invalid_argument("sweep: at least one axis path required");
    for (const auto& row : values)
      if (row.size() != axis_paths.size())
        throw std::invalid_argument("sweep: every value tuple needs one entry per axis path");

    // verify every path up front so an unknown axis fails before any run
    {
      ScenarioDocument probe = doc;
      for (const auto& path : axis_paths) apply_axis_value(probe, path, 1.0);
    }

    std::vector<std::future<SweepRow>> rows;
    for (const auto& tuple : values) {
      rows.push_back(std::async(std::launch::async, [&, tuple]() {
        SweepRow row;
        try {
          ScenarioDocument variant = doc;
          for (std::size_t a = 0; a < axis_paths.size(); ++a)
            apply_axis_value(variant, axis_paths[a], tuple[a]);
          const SimResult result = run_document(variant, override_bounds);
          row.metrics = compute_metrics(result.trajectory, result.events, tail_window);
        } catch (const std::exception& ex) {
          row.error = ex.what();
        }
        return row;
      }));
    }

    std::vector<SweepRow> results;
    for (auto& f : rows) results.push_back(f.get());
    for (const auto& row : results)
      if (!row.error.empty()) throw std::runtime_error("sweep row failed: " + row.error);

    // fixed column set from the first row's metrics
    std::vector<std::string> edge_keys;
    std::vector<int> agent_ids;
    for (const auto& [edge, _] : results.front().metrics.petm_a_edges) edge_keys.push_back(edge);
    for (const auto& [agent, _] : results.front().metrics.petm_b_per_agent)
      agent_ids.push_back(agent);

    std::filesystem::create_directories(out_dir);
    std::ofstream f(out_dir + "/sweep.csv");
    std::ostringstream header;
    for (const auto& path : axis_paths) header << path << ',';
    header << "tail_error,petm_a_count,petm_b_count,petm_c_count";
    for (const auto& edge : edge_keys) header << ",petm_a[" << edge << "]";
    for (int agent : agent_ids) header << ",petm_b[" << agent << "]";
    f << header.str() << '\n';
    os << header.str() << '\n';

    for (std::size_t r = 0; r < results.size(); ++r) {
      const Metrics& m = results[r].metrics;
      std::ostringstream line;
      for (std::size_t a = 0; a < axis_paths.size(); ++a) line << values[r][a] << ',';
      line << m.tail_error << ',' << m.channels.at("petm_a").count << ','
           << m.channels.at("petm_b").count << ',' << m.channels.at("petm_c").count;
      for (const auto& edge : edge_keys) {
        const auto it = m.petm_a_edges.find(edge);
        line << ',' << (it == m.petm_a_edges.end() ? 0 : it->second);
      }
      for (int agent : agent_ids) {
        const auto it = m.petm_b_per_agent.find(agent);
        line << ',' << (it == m.petm_b_per_agent.end() ? 0 : it->second);
      }
      f << line.str() << '\n';
      os << line.str() << '\n';
    }
    return kExitOk;
  } catch (const std::exception& ex) {
    return map_exception_to_exit(ex, os);
  }
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

int run_main(int argc, const char* const* argv) {
  CLI::App app{"Periodic event-triggered cooperative output regulation simulator"};
  app.require_subcommand(1);

  std::string doc_path, out_dir = "out", axis_arg, values_arg;
  bool override_bounds = false;
  double tail_window = 5.0;

  auto* bounds = app.add_subcommand("bounds", "Report admissible sampling periods and bounds");
  bounds->add_option("doc", doc_path, "scenario document")->required();

  auto* run = app.add_subcommand("run", "Simulate a scenario and write CSV outputs");
  run->add_option("doc", doc_path, "scenario document")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--override-bounds", override_bounds, "run even if a period violates its bound");
  run->add_option("--tail-window", tail_window, "metrics tail window in seconds");

  auto* sweep = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  sweep->add_option("doc", doc_path, "scenario document")->required();
  sweep->add_option("--axis", axis_arg, "comma-separated parameter path(s)")->required();
  sweep->add_option("--values", values_arg,
                    "comma-separated values; ':' separates tuple components")
      ->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_flag("--override-bounds", override_bounds, "run even if a period violates its bound");
  sweep->add_option("--tail-window", tail_window, "metrics tail window in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  ScenarioDocument doc;
  try {
    doc = load_scenario_file(doc_path);
  } catch (const std::exception& ex) {
    return map_exception_to_exit(ex, std::cerr);
  }

  if (bounds->parsed()) return cmd_bounds(doc, std::cout);
  if (run->parsed()) return cmd_run(doc, out_dir, override_bounds, tail_window, std::cout);

  const auto axis_paths = split_list(axis_arg, ',');
  std::vector<std::vector<double>> values;
  try {
    for (const auto& tuple_text : split_list(values_arg, ',')) {
      std::vector<double> tuple;
      for (const auto& num : split_list(tuple_text, ':')) tuple.push_back(std::stod(num));
      values.push_back(tuple);
    }
  } catch (const std::exception&) {
    std::cerr << "error: could not parse --values\n";
    return kExitSchema;
  }
  return cmd_sweep(doc, axis_paths, values, out_dir, override_bounds, tail_window, std::cout);
}

}  // namespace petreg
