#ifndef PETREG_SIMULATION_HPP
#define PETREG_SIMULATION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "petreg/controller.hpp"
#include "petreg/graph.hpp"
#include "petreg/observer.hpp"
#include "petreg/plant.hpp"

// Deterministic fixed-step closed-loop simulator. Time lives on an integer
// micro-second grid (the gcd of all configured periods and phases), so grid
// membership is an exact integer test and runs are bit-identical. Continuous
// states advance with classical fourth-order Runge-Kutta between grid
// instants; at each grid instant triggers are evaluated in a fixed order:
// sensor caches, PETM-B, PETM-C, PETM-A.

namespace petreg {

struct SimConfig {
  double t_end = 30.0;
  double comm_period = 0.01;               // shared communication grid
  std::vector<double> sensor_periods;      // per agent
  std::vector<double> sensor_phases;       // per agent; empty means all zero
  int integrator_substeps = 4;             // RK4 steps per grid interval
  bool override_bounds = false;            // skip the admissible-period guard
};

struct TriggerSet {
  double mu1 = 3.0;
  double mu2 = 3.0;
  double kappa = 30.0;
  PetmAConfig petm_a;
  std::vector<TriggerConfig> agent;  // one per follower
};

enum class Channel { PetmA, PetmB, PetmC };

std::string channel_name(Channel c);

/// One trigger transmission. PETM-A rows are per directed edge
/// (src_agent -> agent); PETM-B/PETM-C rows carry src_agent = -1.
/// Agent ids are 1-based; the leader would be id 0 but never triggers.
struct EventRecord {
  Channel channel;
  int agent;
  int src_agent;
  double time;
  std::int64_t tick;
};

struct EventLog {
  std::vector<EventRecord> records;
  std::int64_t tick_us = 0;
  std::int64_t comm_period_ticks = 0;
  std::vector<std::int64_t> sensor_period_ticks;
};

/// Dense state history sampled at every grid instant. Columns:
/// t, v[0..], then per agent i: x[..], xhat[..], e[..], u[..], Serr, verr.
struct Trajectory {
  std::vector<std::string> columns;
  Eigen::MatrixXd data;

  int rows() const { return static_cast<int>(data.rows()); }
  double time(int row) const { return data(row, 0); }
  /// Index of a named column; throws std::out_of_range when absent.
  int column_index(const std::string& name) const;
};

struct SimResult {
  Trajectory trajectory;
  EventLog events;
};

/// Runs the closed loop; deterministic for a fixed configuration. Throws
/// InfeasibleParametersError when a configured period violates its
/// admissibility bound (unless override_bounds) and DivergenceError when any
/// state norm passes 1e9.
SimResult run_scenario(const SimConfig& cfg, const Graph& g, const LeaderModel& leader,
                       const std::vector<FollowerModel>& followers,
                       const std::vector<FollowerGains>& gains, const TriggerSet& triggers);

/// Plain CSV with a header row; floating values at 12 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
void write_events_csv(const EventLog& log, std::ostream& os);

}  // namespace petreg

#endif  // PETREG_SIMULATION_HPP
