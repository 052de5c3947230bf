#include "petreg/metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace petreg {

namespace {

// Events grouped into independent streams: PETM-A per directed edge,
// PETM-B/PETM-C per agent. Gaps are measured inside a stream.
using StreamKey = std::tuple<Channel, int, int>;

double window_max_of_means(const Trajectory& traj, const std::vector<std::vector<int>>& col_groups,
                           int first_row) {
  double worst = 0.0;
  const int rows = traj.rows();
  for (const auto& cols : col_groups) {
    double acc = 0.0;
    for (int r = first_row; r < rows; ++r) {
      double sq = 0.0;
      for (int c : cols) sq += traj.data(r, c) * traj.data(r, c);
      acc += std::sqrt(sq);
    }
    worst = std::max(worst, acc / (rows - first_row));
  }
  return worst;
}

}  // namespace

Metrics compute_metrics(const Trajectory& traj, const EventLog& log, double tail_window) {
  if (traj.rows() == 0) throw std::invalid_argument("compute_metrics: empty trajectory");
  const double t_end = traj.time(traj.rows() - 1);
  if (tail_window <= 0.0 || tail_window >= t_end + 1e-12)
    throw std::invalid_argument("compute_metrics: tail_window must lie inside the run");

  Metrics out;

  // tail errors
  int first_row = 0;
  while (first_row < traj.rows() - 1 && traj.time(first_row) < t_end - tail_window - 1e-12)
    ++first_row;
  int agent_count = 0;
  for (const auto& name : traj.columns)
    if (name.rfind("agent", 0) == 0 && name.find(".Serr") != std::string::npos) ++agent_count;

  std::vector<std::vector<int>> err_cols(agent_count), s_cols(agent_count), v_cols(agent_count);
  for (int i = 0; i < agent_count; ++i) {
    const std::string tag = "agent" + std::to_string(i + 1) + ".";
    for (std::size_t c = 0; c < traj.columns.size(); ++c) {
      const auto& name = traj.columns[c];
      if (name.rfind(tag + "e[", 0) == 0) err_cols[i].push_back(static_cast<int>(c));
    }
    s_cols[i].push_back(traj.column_index(tag + "Serr"));
    v_cols[i].push_back(traj.column_index(tag + "verr"));
  }
  out.tail_error = window_max_of_means(traj, err_cols, first_row);
  out.tail_s_error = window_max_of_means(traj, s_cols, first_row);
  out.tail_v_error = window_max_of_means(traj, v_cols, first_row);

  // per-stream gap statistics on the integer grid
  std::map<StreamKey, std::vector<std::int64_t>> streams;
  for (const auto& rec : log.records) {
    streams[{rec.channel, rec.agent, rec.src_agent}].push_back(rec.tick);
    switch (rec.channel) {
      case Channel::PetmA:
        out.petm_a_edges[std::to_string(rec.src_agent) + "-" + std::to_string(rec.agent)]++;
        break;
      case Channel::PetmB: out.petm_b_per_agent[rec.agent]++; break;
      case Channel::PetmC: out.petm_c_per_agent[rec.agent]++; break;
    }
  }

  for (const auto ch : {Channel::PetmA, Channel::PetmB, Channel::PetmC}) {
    ChannelMetrics cm;
    double gap_sum = 0.0;
    long gap_count = 0;
    std::int64_t min_gap_ticks = std::numeric_limits<std::int64_t>::max();
    for (const auto& [key, ticks] : streams) {
      if (std::get<0>(key) != ch) continue;
      cm.count += static_cast<long>(ticks.size());
      const int agent = std::get<1>(key);
      const std::int64_t period_ticks =
          ch == Channel::PetmA
              ? log.comm_period_ticks
              : log.sensor_period_ticks.at(static_cast<std::size_t>(agent - 1));
      for (std::size_t j = 1; j < ticks.size(); ++j) {
        const std::int64_t gap = ticks[j] - ticks[j - 1];
        if (gap <= 0)
          throw std::invalid_argument("compute_metrics: event times not strictly increasing");
        min_gap_ticks = std::min(min_gap_ticks, gap);
        gap_sum += static_cast<double>(gap) * static_cast<double>(log.tick_us) * 1e-6;
        ++gap_count;
        if (gap % period_ticks != 0 || gap < period_ticks) cm.gaps_on_grid = false;
      }
    }
    cm.min_gap = gap_count ? static_cast<double>(min_gap_ticks) *
                                 static_cast<double>(log.tick_us) * 1e-6
                           : 0.0;
    cm.mean_gap = gap_count ? gap_sum / gap_count : 0.0;
    out.multiples_of_period = out.multiples_of_period && cm.gaps_on_grid;
    out.channels[channel_name(ch)] = cm;
  }
  return out;
}

void write_metrics_json(const Metrics& m, std::ostream& os) {
  nlohmann::json j;
  j["tail_error"] = m.tail_error;
  j["tail_s_error"] = m.tail_s_error;
  j["tail_v_error"] = m.tail_v_error;
  j["multiples_of_period"] = m.multiples_of_period;
  for (const auto& [name, cm] : m.channels) {
    j["channels"][name] = {{"count", cm.count},
                           {"min_gap", cm.min_gap},
                           {"mean_gap", cm.mean_gap},
                           {"gaps_on_grid", cm.gaps_on_grid}};
  }
  for (const auto& [edge, count] : m.petm_a_edges) j["petm_a_edges"][edge] = count;
  for (const auto& [agent, count] : m.petm_b_per_agent)
    j["petm_b_per_agent"][std::to_string(agent)] = count;
  for (const auto& [agent, count] : m.petm_c_per_agent)
    j["petm_c_per_agent"][std::to_string(agent)] = count;
  os << j.dump(2) << '\n';
}

}  // namespace petreg
