#ifndef PETREG_METRICS_HPP
#define PETREG_METRICS_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "petreg/simulation.hpp"

namespace petreg {

struct ChannelMetrics {
  long count = 0;               // transmissions (PETM-A: edge rows)
  double min_gap = 0.0;         // smallest inter-event time over all streams
  double mean_gap = 0.0;        // mean over all inter-event gaps
  bool gaps_on_grid = true;     // every gap >= period and an integer multiple
};

struct Metrics {
  double tail_error = 0.0;      // max over agents of mean ||e_i|| on the window
  double tail_s_error = 0.0;    // same for the S-estimate error
  double tail_v_error = 0.0;    // same for the v-estimate error
  std::map<std::string, ChannelMetrics> channels;
  std::map<std::string, long> petm_a_edges;      // keyed "src-dst"
  std::map<int, long> petm_b_per_agent;
  std::map<int, long> petm_c_per_agent;
  bool multiples_of_period = true;               // conjunction over channels
};

/// Summarises a run: per-channel counts and gap statistics (computed on the
/// exact integer tick grid), plus regulation and observer tail errors averaged
/// over the final tail_window seconds.
Metrics compute_metrics(const Trajectory& traj, const EventLog& log, double tail_window);

void write_metrics_json(const Metrics& m, std::ostream& os);

}  // namespace petreg

#endif  // PETREG_METRICS_HPP
