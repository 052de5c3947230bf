#include "petreg/observer.hpp"

#include <cmath>
#include <stdexcept>

namespace petreg {

ObserverState ObserverState::zero(int leader_dim) {
  ObserverState st;
  st.s_hat = Matrix::Zero(leader_dim, leader_dim);
  st.v_hat = Vector::Zero(leader_dim);
  st.s_held = Matrix::Zero(leader_dim, leader_dim);
  st.anchor_time = 0.0;
  st.v_anchor = Vector::Zero(leader_dim);
  return st;
}

Vector held_leader_estimate(const ObserverState& st, double t) {
  if (t < st.anchor_time)
    throw std::invalid_argument("held_leader_estimate: t precedes the anchor instant");
  if (t == st.anchor_time) return st.v_anchor;
  return mat_exp(Matrix(st.s_held * (t - st.anchor_time))) * st.v_anchor;
}

std::vector<ObserverDerivative> observer_derivatives(const std::vector<ObserverState>& states,
                                                     const Graph& g, const LeaderModel& leader,
                                                     double mu1, double mu2, double t) {
  const int n = g.follower_count();
  if (static_cast<int>(states.size()) != n)
    throw std::invalid_argument("observer_derivatives: one state per follower required");
  const int nv = leader.state_dim();

  std::vector<Vector> v_bar(n);
  for (int i = 0; i < n; ++i) {
    if (states[i].s_hat.rows() != nv || states[i].v_hat.size() != nv)
      throw std::invalid_argument("observer_derivatives: state dimension mismatch");
    v_bar[i] = held_leader_estimate(states[i], t);
  }
  const Vector v_leader = leader_flow(leader, t);

  std::vector<ObserverDerivative> out(n);
  for (int i = 0; i < n; ++i) {
    Matrix ds = Matrix::Zero(nv, nv);
    Vector dv = states[i].s_held * states[i].v_hat;
    for (int j = 0; j < n; ++j) {
      if (g.adjacency(i, j) == 1.0) {
        ds += mu1 * (states[j].s_held - states[i].s_held);
        dv += mu2 * (v_bar[j] - v_bar[i]);
      }
    }
    if (g.pinning(i) == 1.0) {
      // leader channel: exact S and v(t), no event triggering
      ds += mu1 * (leader.s_matrix - states[i].s_held);
      dv += mu2 * (v_leader - v_bar[i]);
    }
    out[i] = ObserverDerivative{std::move(ds), std::move(dv)};
  }
  return out;
}

PetmADecision petm_a_evaluate(const ObserverState& st, const PetmAConfig& cfg, double tau,
                              double comm_period) {
  if (cfg.iota_s <= 0.0 || cfg.gamma_s <= 0.0 || cfg.iota_v <= 0.0 || cfg.gamma_v <= 0.0)
    throw std::invalid_argument("petm_a_evaluate: threshold parameters must be positive");
  if (comm_period <= 0.0)
    throw std::invalid_argument("petm_a_evaluate: comm_period must be positive");
  const double ratio = tau / comm_period;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    throw std::invalid_argument("petm_a_evaluate: tau is not on the sampling grid");
  if (tau <= st.anchor_time)
    throw std::invalid_argument("petm_a_evaluate: tau must follow the last broadcast");

  const double f_s =
      frobenius_norm(Matrix(st.s_hat - st.s_held)) - cfg.iota_s * std::exp(-cfg.gamma_s * tau);
  const double f_v =
      (st.v_hat - held_leader_estimate(st, tau)).norm() - cfg.iota_v * std::exp(-cfg.gamma_v * tau);

  const bool fire = cfg.combine_mode == CombineMode::And ? (f_s > 0.0 && f_v > 0.0)
                                                         : (f_s > 0.0 || f_v > 0.0);
  return PetmADecision{fire, f_s, f_v};
}

}  // namespace petreg
