#ifndef PETREG_OBSERVER_HPP
#define PETREG_OBSERVER_HPP

#include <Eigen/Dense>
#include <vector>

#include "petreg/graph.hpp"
#include "petreg/plant.hpp"

// Periodic event-triggered distributed observer. Each agent integrates a local
// estimate (S_hat, v_hat) of the leader's matrix and state, driven entirely by
// the held copies its neighbours last broadcast. Broadcast instants live on
// the shared communication grid and are selected by the PETM-A rule.

namespace petreg {

enum class CombineMode { And, Or };

struct PetmAConfig {
  double iota_s = 2.0;
  double gamma_s = 1.0;
  double iota_v = 2.0;
  double gamma_v = 1.0;
  CombineMode combine_mode = CombineMode::Or;
};

struct ObserverState {
  Matrix s_hat;        // current estimate of S
  Vector v_hat;        // current estimate of v
  Matrix s_held;       // S_hat sampled at the last broadcast
  double anchor_time;  // last broadcast instant
  Vector v_anchor;     // v_hat sampled at the last broadcast

  static ObserverState zero(int leader_dim);
};

struct ObserverDerivative {
  Matrix ds_hat;
  Vector dv_hat;
};

struct PetmADecision {
  bool fire;
  double f_s;
  double f_v;
};

/// Extrapolates the held broadcast under the frozen estimate dynamics:
/// exp(s_held * (t - anchor)) * v_anchor. Requires t >= anchor time.
Vector held_leader_estimate(const ObserverState& st, double t);

/// Consensus derivatives for all agents at time t. Held values enter as
/// constants; pinned agents additionally see the true (S, v(t)) of the leader.
std::vector<ObserverDerivative> observer_derivatives(const std::vector<ObserverState>& states,
                                                     const Graph& g, const LeaderModel& leader,
                                                     double mu1, double mu2, double t);

/// Evaluates the broadcast rule at grid instant tau (tau must lie on the grid
/// of period comm_period and after the agent's last broadcast). Returns both
/// trigger function values; on fire the caller re-anchors and broadcasts.
PetmADecision petm_a_evaluate(const ObserverState& st, const PetmAConfig& cfg, double tau,
                              double comm_period);

}  // namespace petreg

#endif  // PETREG_OBSERVER_HPP
