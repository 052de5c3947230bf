#include "petreg/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace petreg {

namespace {

constexpr double kDivergenceGuard = 1e9;

std::int64_t to_micros(double seconds, const char* what) {
  const double scaled = seconds * 1e6;
  const std::int64_t us = std::llround(scaled);
  if (us <= 0) throw std::invalid_argument(std::string(what) + ": must be at least 1e-6 s");
  if (std::abs(scaled - static_cast<double>(us)) > 1e-3)
    throw std::invalid_argument(std::string(what) +
                                ": not representable on the 1e-6 s time grid");
  return us;
}

double to_seconds(std::int64_t us) { return static_cast<double>(us) * 1e-6; }

// Per-agent quantities that are not integrated: held broadcasts, held
// transmissions and the sensor cache. Observer held data lives inside
// ObserverState; controller held data inside ControllerState.
struct AgentLoop {
  ObserverState obs;
  ControllerState ctl;
  Vector x;  // plant state
};

// Flat RK4 state layout per agent: s_hat | v_hat | chi_hat | x | x_hat.
struct StateLayout {
  int nv = 0;
  std::vector<int> offset;      // per agent
  std::vector<int> state_dim;   // plant/controller observer dimension
  std::vector<int> chi_dim;
  int total = 0;
};

StateLayout make_layout(const LeaderModel& leader, const std::vector<FollowerModel>& followers) {
  StateLayout lay;
  lay.nv = leader.state_dim();
  int at = 0;
  for (const auto& m : followers) {
    lay.offset.push_back(at);
    lay.state_dim.push_back(m.state_dim());
    lay.chi_dim.push_back((m.state_dim() + m.input_dim()) * lay.nv);
    at += lay.nv * lay.nv + lay.nv + lay.chi_dim.back() + 2 * m.state_dim();
  }
  lay.total = at;
  return lay;
}

void pack(const StateLayout& lay, const std::vector<AgentLoop>& agents, Vector& y) {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    int at = lay.offset[i];
    const int nv = lay.nv;
    const int nx = lay.state_dim[i];
    Eigen::Map<Matrix>(y.data() + at, nv, nv) = agents[i].obs.s_hat;
    at += nv * nv;
    y.segment(at, nv) = agents[i].obs.v_hat;
    at += nv;
    y.segment(at, lay.chi_dim[i]) = agents[i].ctl.chi_hat;
    at += lay.chi_dim[i];
    y.segment(at, nx) = agents[i].x;
    at += nx;
    y.segment(at, nx) = agents[i].ctl.x_hat;
  }
}

void unpack(const StateLayout& lay, const Vector& y, std::vector<AgentLoop>& agents) {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    int at = lay.offset[i];
    const int nv = lay.nv;
    const int nx = lay.state_dim[i];
    agents[i].obs.s_hat = Eigen::Map<const Matrix>(y.data() + at, nv, nv);
    at += nv * nv;
    agents[i].obs.v_hat = y.segment(at, nv);
    at += nv;
    agents[i].ctl.chi_hat = y.segment(at, lay.chi_dim[i]);
    at += lay.chi_dim[i];
    agents[i].x = y.segment(at, nx);
    at += nx;
    agents[i].ctl.x_hat = y.segment(at, nx);
  }
}

}  // namespace

std::string channel_name(Channel c) {
  switch (c) {
    case Channel::PetmA: return "petm_a";
    case Channel::PetmB: return "petm_b";
    case Channel::PetmC: return "petm_c";
  }
  return "unknown";
}

int Trajectory::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("Trajectory: no column named " + name);
  return static_cast<int>(it - columns.begin());
}

SimResult run_scenario(const SimConfig& cfg, const Graph& g, const LeaderModel& leader,
                       const std::vector<FollowerModel>& followers,
                       const std::vector<FollowerGains>& gains, const TriggerSet& triggers) {
  g.validate();
  leader.validate();
  const int n = g.follower_count();
  const int nv = leader.state_dim();
  if (static_cast<int>(followers.size()) != n || static_cast<int>(gains.size()) != n ||
      static_cast<int>(triggers.agent.size()) != n)
    throw std::invalid_argument("run_scenario: one follower/gain/trigger set per graph node");
  if (static_cast<int>(cfg.sensor_periods.size()) != n)
    throw std::invalid_argument("run_scenario: one sensor period per follower");
  if (!cfg.sensor_phases.empty() && static_cast<int>(cfg.sensor_phases.size()) != n)
    throw std::invalid_argument("run_scenario: sensor phase list length mismatch");
  if (cfg.integrator_substeps < 1)
    throw std::invalid_argument("run_scenario: integrator_substeps must be >= 1");
  for (int i = 0; i < n; ++i) {
    followers[i].validate(nv);
    if (!is_hurwitz(Matrix(followers[i].a + followers[i].b * gains[i].k)))
      throw std::invalid_argument("run_scenario: a + b*k is not Hurwitz for agent " +
                                  std::to_string(i + 1));
    if (!is_hurwitz(Matrix(followers[i].a + gains[i].l * followers[i].c_m)))
      throw std::invalid_argument("run_scenario: a + l*c_m is not Hurwitz for agent " +
                                  std::to_string(i + 1));
  }

  if (!cfg.override_bounds) {
    const double t_bound = observer_period_bound(g, triggers.mu1, triggers.mu2);
    if (cfg.comm_period >= t_bound)
      throw InfeasibleParametersError("run_scenario: comm_period " +
                                      std::to_string(cfg.comm_period) +
                                      " is not below the admissible bound " +
                                      std::to_string(t_bound));
    for (int i = 0; i < n; ++i) {
      const auto mode =
          triggers.agent[i].petm_c_enabled ? SensorPeriodMode::C : SensorPeriodMode::B;
      const double s_bound = sensor_period_bound(followers[i], gains[i].k, gains[i].l, mode);
      if (cfg.sensor_periods[i] >= s_bound)
        throw InfeasibleParametersError(
            "run_scenario: sensor period for agent " + std::to_string(i + 1) +
            " is not below the admissible bound " + std::to_string(s_bound));
    }
  }

  // Integer time grid: every configured period/phase is a multiple of tick_us.
  const std::int64_t comm_us = to_micros(cfg.comm_period, "comm_period");
  std::vector<std::int64_t> sensor_us(n), phase_us(n, 0);
  std::int64_t tick_us = comm_us;
  for (int i = 0; i < n; ++i) {
    sensor_us[i] = to_micros(cfg.sensor_periods[i], "sensor_period");
    tick_us = std::gcd(tick_us, sensor_us[i]);
    if (!cfg.sensor_phases.empty() && cfg.sensor_phases[i] != 0.0) {
      phase_us[i] = to_micros(cfg.sensor_phases[i], "sensor_phase");
      tick_us = std::gcd(tick_us, phase_us[i]);
    }
  }
  const std::int64_t t_end_us = to_micros(cfg.t_end, "t_end");
  if (t_end_us % tick_us != 0)
    throw std::invalid_argument("run_scenario: t_end must be a multiple of the grid tick");
  const std::int64_t steps = t_end_us / tick_us;
  const double tick_sec = to_seconds(tick_us);
  const double h = tick_sec / cfg.integrator_substeps;

  std::vector<AgentLoop> agents(n);
  for (int i = 0; i < n; ++i) {
    agents[i].obs = ObserverState::zero(nv);
    agents[i].ctl = ControllerState::zero(followers[i], nv);
    agents[i].x = followers[i].x0;
  }

  const StateLayout lay = make_layout(leader, followers);
  Vector y(lay.total), scratch(lay.total);
  Vector k1(lay.total), k2(lay.total), k3(lay.total), k4(lay.total);
  pack(lay, agents, y);

  // Derivative of the full coupled system; held values and caches enter as
  // zero-order-hold context, so the right-hand side is smooth on each tick.
  std::vector<AgentLoop> stage = agents;
  std::vector<ObserverState> obs_view(n);
  auto derivative = [&](const Vector& state, double t, Vector& out) {
    unpack(lay, state, stage);
    for (int i = 0; i < n; ++i) {
      stage[i].obs.s_held = agents[i].obs.s_held;
      stage[i].obs.anchor_time = agents[i].obs.anchor_time;
      stage[i].obs.v_anchor = agents[i].obs.v_anchor;
      obs_view[i] = stage[i].obs;
    }
    const auto obs_d = observer_derivatives(obs_view, g, leader, triggers.mu1, triggers.mu2, t);
    const Vector v_leader = leader_flow(leader, t);
    for (int i = 0; i < n; ++i) {
      stage[i].ctl.psi_held = agents[i].ctl.psi_held;
      stage[i].ctl.omega_held = agents[i].ctl.omega_held;
      stage[i].ctl.cache = agents[i].ctl.cache;

      const Vector dchi = adaptive_regulator_step(stage[i].ctl.chi_hat, stage[i].obs.s_hat,
                                                  followers[i], triggers.kappa);
      const Vector dxh = controller_observer_derivative(
          stage[i].ctl, followers[i], gains[i], triggers.agent[i], stage[i].obs.v_hat, t);
      const Vector u = triggers.agent[i].petm_c_enabled
                           ? stage[i].ctl.omega_held
                           : control_signal(stage[i].ctl, followers[i], gains[i],
                                            stage[i].obs.v_hat);
      const Vector dx = follower_derivative(followers[i], stage[i].x, u, v_leader);

      int at = lay.offset[i];
      Eigen::Map<Matrix>(out.data() + at, nv, nv) = obs_d[i].ds_hat;
      at += nv * nv;
      out.segment(at, nv) = obs_d[i].dv_hat;
      at += nv;
      out.segment(at, lay.chi_dim[i]) = dchi;
      at += lay.chi_dim[i];
      out.segment(at, lay.state_dim[i]) = dx;
      at += lay.state_dim[i];
      out.segment(at, lay.state_dim[i]) = dxh;
    }
  };

  // Trajectory layout
  Trajectory traj;
  traj.columns.push_back("t");
  for (int j = 0; j < nv; ++j) traj.columns.push_back("v[" + std::to_string(j) + "]");
  for (int i = 0; i < n; ++i) {
    const std::string tag = "agent" + std::to_string(i + 1) + ".";
    for (int j = 0; j < followers[i].state_dim(); ++j)
      traj.columns.push_back(tag + "x[" + std::to_string(j) + "]");
    for (int j = 0; j < followers[i].state_dim(); ++j)
      traj.columns.push_back(tag + "xhat[" + std::to_string(j) + "]");
    for (int j = 0; j < followers[i].error_dim(); ++j)
      traj.columns.push_back(tag + "e[" + std::to_string(j) + "]");
    for (int j = 0; j < followers[i].input_dim(); ++j)
      traj.columns.push_back(tag + "u[" + std::to_string(j) + "]");
    traj.columns.push_back(tag + "Serr");
    traj.columns.push_back(tag + "verr");
  }
  traj.data.resize(steps + 1, static_cast<Eigen::Index>(traj.columns.size()));

  EventLog log;
  log.tick_us = tick_us;
  log.comm_period_ticks = comm_us / tick_us;
  for (int i = 0; i < n; ++i) log.sensor_period_ticks.push_back(sensor_us[i] / tick_us);

  auto log_event = [&](Channel ch, int agent_id, int src, std::int64_t tick, double t) {
    log.records.push_back(EventRecord{ch, agent_id, src, t, tick});
  };
  auto log_broadcast = [&](int src_idx, std::int64_t tick, double t) {
    for (int r = 0; r < n; ++r)
      if (g.adjacency(r, src_idx) == 1.0) log_event(Channel::PetmA, r + 1, src_idx + 1, tick, t);
  };

  for (std::int64_t k = 0; k <= steps; ++k) {
    const std::int64_t t_us = k * tick_us;
    const double t = to_seconds(t_us);
    const Vector v_leader = leader_flow(leader, t);

    if (k == 0) {
      // initial broadcasts and transmissions by convention at t = 0
      for (int i = 0; i < n; ++i) {
        auto& ag = agents[i];
        ag.obs.s_held = ag.obs.s_hat;
        ag.obs.anchor_time = 0.0;
        ag.obs.v_anchor = ag.obs.v_hat;
        const Vector v_bar = held_leader_estimate(ag.obs, t);
        const Vector omega = control_signal(ag.ctl, followers[i], gains[i], ag.obs.v_hat);
        ag.ctl.cache = SampledCache{ag.ctl.x_hat, omega, v_bar, t, true};
        ag.ctl.omega_held = omega;
        ag.ctl.omega_anchor_time = 0.0;
        const Vector u0 = triggers.agent[i].petm_c_enabled ? ag.ctl.omega_held : omega;
        const Vector y_m = measurement(followers[i], ag.x, u0, v_leader);
        ag.ctl.psi_held = psi_signal(followers[i], triggers.agent[i], v_bar, y_m);
        ag.ctl.y_m_held = y_m;
        ag.ctl.psi_anchor_time = 0.0;
        log_broadcast(i, k, t);
        log_event(Channel::PetmB, i + 1, -1, k, t);
        if (triggers.agent[i].petm_c_enabled) log_event(Channel::PetmC, i + 1, -1, k, t);
      }
    } else {
      // 1) sensor sampling caches
      for (int i = 0; i < n; ++i) {
        const std::int64_t rel = t_us - phase_us[i];
        if (rel >= 0 && rel % sensor_us[i] == 0) {
          auto& ag = agents[i];
          const Vector v_bar = held_leader_estimate(ag.obs, t);
          const Vector omega = control_signal(ag.ctl, followers[i], gains[i], ag.obs.v_hat);
          ag.ctl.cache = SampledCache{ag.ctl.x_hat, omega, v_bar, t, true};
        }
      }
      // 2) PETM-B on the sensor grid
      for (int i = 0; i < n; ++i) {
        const std::int64_t rel = t_us - phase_us[i];
        if (rel >= 0 && rel % sensor_us[i] == 0) {
          auto& ag = agents[i];
          const Vector v_bar = held_leader_estimate(ag.obs, t);
          const Vector omega = control_signal(ag.ctl, followers[i], gains[i], ag.obs.v_hat);
          const Vector u_now = triggers.agent[i].petm_c_enabled ? ag.ctl.omega_held : omega;
          const Vector y_m = measurement(followers[i], ag.x, u_now, v_leader);
          const Vector psi = psi_signal(followers[i], triggers.agent[i], v_bar, y_m);
          const auto decision =
              petm_b_evaluate(ag.ctl, triggers.agent[i], t, psi, y_m,
                              to_seconds(sensor_us[i]), to_seconds(phase_us[i]));
          if (decision.fire) {
            ag.ctl.psi_held = psi;
            ag.ctl.y_m_held = y_m;
            ag.ctl.psi_anchor_time = t;
            log_event(Channel::PetmB, i + 1, -1, k, t);
          }
        }
      }
      // 3) PETM-C on the period-aligned actuation grid
      for (int i = 0; i < n; ++i) {
        if (triggers.agent[i].petm_c_enabled && t_us % sensor_us[i] == 0) {
          auto& ag = agents[i];
          const Vector omega = control_signal(ag.ctl, followers[i], gains[i], ag.obs.v_hat);
          const auto decision =
              petm_c_evaluate(ag.ctl, triggers.agent[i], t, omega, to_seconds(sensor_us[i]));
          if (decision.fire) {
            ag.ctl.omega_held = omega;
            ag.ctl.omega_anchor_time = t;
            log_event(Channel::PetmC, i + 1, -1, k, t);
          }
        }
      }
      // 4) PETM-A on the communication grid
      for (int i = 0; i < n; ++i) {
        if (t_us % comm_us == 0) {
          auto& ag = agents[i];
          const auto decision =
              petm_a_evaluate(ag.obs, triggers.petm_a, t, cfg.comm_period);
          if (decision.fire) {
            ag.obs.s_held = ag.obs.s_hat;
            ag.obs.anchor_time = t;
            ag.obs.v_anchor = ag.obs.v_hat;
            log_broadcast(i, k, t);
          }
        }
      }
    }

    // record the sample row
    {
      int col = 0;
      traj.data(k, col++) = t;
      for (int j = 0; j < nv; ++j) traj.data(k, col++) = v_leader(j);
      for (int i = 0; i < n; ++i) {
        const auto& ag = agents[i];
        const Vector omega = control_signal(ag.ctl, followers[i], gains[i], ag.obs.v_hat);
        const Vector u = triggers.agent[i].petm_c_enabled ? ag.ctl.omega_held : omega;
        const Vector err = regulation_error(followers[i], ag.x, u, v_leader);
        for (int j = 0; j < ag.x.size(); ++j) traj.data(k, col++) = ag.x(j);
        for (int j = 0; j < ag.ctl.x_hat.size(); ++j) traj.data(k, col++) = ag.ctl.x_hat(j);
        for (int j = 0; j < err.size(); ++j) traj.data(k, col++) = err(j);
        for (int j = 0; j < u.size(); ++j) traj.data(k, col++) = u(j);
        traj.data(k, col++) = frobenius_norm(Matrix(ag.obs.s_hat - leader.s_matrix));
        traj.data(k, col++) = (ag.obs.v_hat - v_leader).norm();
      }
    }

    if (k == steps) break;

    // integrate the tick with fixed-step RK4
    pack(lay, agents, y);
    for (int s = 0; s < cfg.integrator_substeps; ++s) {
      const double ts = t + s * h;
      derivative(y, ts, k1);
      scratch = y + (h / 2.0) * k1;
      derivative(scratch, ts + h / 2.0, k2);
      scratch = y + (h / 2.0) * k2;
      derivative(scratch, ts + h / 2.0, k3);
      scratch = y + h * k3;
      derivative(scratch, ts + h, k4);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > kDivergenceGuard)
      throw DivergenceError("run_scenario: state diverged at t = " + std::to_string(t + tick_sec),
                            t + tick_sec);
    unpack(lay, y, agents);
  }

  return SimResult{std::move(traj), std::move(log)};
}

namespace {

void write_value(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  os << buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  for (std::size_t j = 0; j < traj.columns.size(); ++j) {
    if (j) os << ',';
    os << traj.columns[j];
  }
  os << '\n';
  for (int r = 0; r < traj.rows(); ++r) {
    for (Eigen::Index j = 0; j < traj.data.cols(); ++j) {
      if (j) os << ',';
      write_value(os, traj.data(r, j));
    }
    os << '\n';
  }
}

void write_events_csv(const EventLog& log, std::ostream& os) {
  os << "channel,agent,src_agent,t\n";
  for (const auto& rec : log.records) {
    os << channel_name(rec.channel) << ',' << rec.agent << ',' << rec.src_agent << ',';
    write_value(os, rec.time);
    os << '\n';
  }
}

}  // namespace petreg
