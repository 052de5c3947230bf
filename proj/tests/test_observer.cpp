#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "petreg/observer.hpp"
#include "scenario_fixtures.hpp"

using namespace petreg;
using namespace petreg::testing;

namespace {

struct ObserverRecording {
  std::vector<std::vector<Matrix>> s_hat;  // [tick][agent]
  std::vector<std::vector<Vector>> v_hat;
};

// Observer-network-only forward simulation on the communication grid; used to
// record estimate sequences for trigger-replay tests.
ObserverRecording record_observer_run(const Graph& g, const LeaderModel& leader,
                                      const PetmAConfig& cfg, double period, int ticks,
                                      int substeps) {
  const int n = g.follower_count();
  const int nv = leader.state_dim();
  std::vector<ObserverState> states(n, ObserverState::zero(nv));
  ObserverRecording rec;

  const double h = period / substeps;
  for (int k = 0; k <= ticks; ++k) {
    const double t = k * period;
    if (k > 0) {
      for (auto& st : states) {
        const auto decision = petm_a_evaluate(st, cfg, t, period);
        if (decision.fire) {
          st.s_held = st.s_hat;
          st.anchor_time = t;
          st.v_anchor = st.v_hat;
        }
      }
    }
    rec.s_hat.emplace_back();
    rec.v_hat.emplace_back();
    for (const auto& st : states) {
      rec.s_hat.back().push_back(st.s_hat);
      rec.v_hat.back().push_back(st.v_hat);
    }
    if (k == ticks) break;

    for (int sub = 0; sub < substeps; ++sub) {
      const double ts = t + sub * h;
      auto advance = [&](const std::vector<ObserverState>& base, double dt,
                         const std::vector<ObserverDerivative>& d) {
        std::vector<ObserverState> out = base;
        for (int i = 0; i < n; ++i) {
          out[i].s_hat = base[i].s_hat + dt * d[i].ds_hat;
          out[i].v_hat = base[i].v_hat + dt * d[i].dv_hat;
        }
        return out;
      };
      const auto k1 = observer_derivatives(states, g, leader, 3.0, 3.0, ts);
      const auto s2 = advance(states, h / 2, k1);
      const auto k2 = observer_derivatives(s2, g, leader, 3.0, 3.0, ts + h / 2);
      const auto s3 = advance(states, h / 2, k2);
      const auto k3 = observer_derivatives(s3, g, leader, 3.0, 3.0, ts + h / 2);
      const auto s4 = advance(states, h, k3);
      const auto k4 = observer_derivatives(s4, g, leader, 3.0, 3.0, ts + h);
      for (int i = 0; i < n; ++i) {
        states[i].s_hat += h / 6 * (k1[i].ds_hat + 2 * k2[i].ds_hat + 2 * k3[i].ds_hat +
                                    k4[i].ds_hat);
        states[i].v_hat += h / 6 * (k1[i].dv_hat + 2 * k2[i].dv_hat + 2 * k3[i].dv_hat +
                                    k4[i].dv_hat);
      }
    }
  }
  return rec;
}

// Replays only the trigger automaton over a frozen recording and counts fires.
long replay_trigger_count(const ObserverRecording& rec, const PetmAConfig& cfg, double period) {
  const int n = static_cast<int>(rec.s_hat.front().size());
  const int nv = static_cast<int>(rec.v_hat.front().front().size());
  long total = 0;
  std::vector<ObserverState> held(n, ObserverState::zero(nv));
  for (int i = 0; i < n; ++i) {
    held[i].s_held = rec.s_hat[0][i];
    held[i].v_anchor = rec.v_hat[0][i];
  }
  for (std::size_t k = 1; k < rec.s_hat.size(); ++k) {
    const double t = static_cast<double>(k) * period;
    for (int i = 0; i < n; ++i) {
      held[i].s_hat = rec.s_hat[k][i];
      held[i].v_hat = rec.v_hat[k][i];
      const auto decision = petm_a_evaluate(held[i], cfg, t, period);
      if (decision.fire) {
        ++total;
        held[i].s_held = held[i].s_hat;
        held[i].anchor_time = t;
        held[i].v_anchor = held[i].v_hat;
      }
    }
  }
  return total;
}

}  // namespace

TEST_CASE("held_leader_estimate") {
  ObserverState st = ObserverState::zero(2);
  st.anchor_time = 1.0;
  st.v_anchor = Vector(2);
  st.v_anchor << 0.4, -0.2;

  CHECK(held_leader_estimate(st, 1.0) == st.v_anchor);
  CHECK(held_leader_estimate(st, 5.0) == st.v_anchor);  // zero held dynamics

  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  st.s_held = rot;
  const Vector extrapolated = held_leader_estimate(st, 1.0 + M_PI_2);
  CHECK(extrapolated(0) == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(extrapolated(1) == doctest::Approx(-0.4).epsilon(1e-12));

  CHECK_THROWS_AS(held_leader_estimate(st, 0.5), std::invalid_argument);
}

TEST_CASE("leader channel reproduces the true flow") {
  LeaderModel leader = make_leader(four_follower_document());
  ObserverState st = ObserverState::zero(2);
  st.s_held = leader.s_matrix;
  st.v_anchor = leader.v0;
  for (double t : {0.0, 0.7, 2.9})
    CHECK((held_leader_estimate(st, t) - leader_flow(leader, t)).norm() <= 1e-12);
}

TEST_CASE("observer_derivatives consensus fixed point") {
  const auto doc = four_follower_document();
  const Graph g = make_graph(doc);
  const LeaderModel leader = make_leader(doc);
  const double t = 1.3;

  std::vector<ObserverState> states(4, ObserverState::zero(2));
  for (auto& st : states) {
    st.s_hat = leader.s_matrix;
    st.s_held = leader.s_matrix;
    st.anchor_time = 0.0;
    st.v_anchor = leader.v0;
    st.v_hat = held_leader_estimate(st, t);
  }
  const auto d = observer_derivatives(states, g, leader, 3.0, 3.0, t);
  for (int i = 0; i < 4; ++i) {
    CHECK(d[i].ds_hat.isZero(1e-12));
    CHECK((d[i].dv_hat - leader.s_matrix * states[i].v_hat).norm() <= 1e-10);
  }
}

TEST_CASE("observer_derivatives single pinned follower") {
  Graph g;
  g.adjacency = Matrix::Zero(1, 1);
  g.pinning = Vector::Ones(1);
  LeaderModel leader = make_leader(four_follower_document());

  ObserverState st = ObserverState::zero(2);
  st.s_held = leader.s_matrix;
  st.v_hat = Vector(2);
  st.v_hat << 0.1, 0.2;
  const double t = 0.8;

  const auto d = observer_derivatives({st}, g, leader, 2.0, 5.0, t);
  CHECK(d[0].ds_hat.isZero(1e-12));
  const Vector expected = leader.s_matrix * st.v_hat +
                          5.0 * (leader_flow(leader, t) - held_leader_estimate(st, t));
  CHECK((d[0].dv_hat - expected).norm() <= 1e-12);
}

TEST_CASE("observer_derivatives at t=0 with zero estimates") {
  const auto doc = four_follower_document();
  const Graph g = make_graph(doc);
  const LeaderModel leader = make_leader(doc);
  std::vector<ObserverState> states(4, ObserverState::zero(2));

  const auto d = observer_derivatives(states, g, leader, 3.0, 3.0, 0.0);
  CHECK((d[0].ds_hat - 3.0 * leader.s_matrix).norm() <= 1e-12);  // pinned agent moves
  for (int i = 1; i < 4; ++i) CHECK(d[i].ds_hat.isZero(1e-12));
}

TEST_CASE("petm_a_evaluate thresholds and boundaries") {
  PetmAConfig cfg;  // iota 2, gamma 1, OR
  ObserverState st = ObserverState::zero(2);
  const double period = 0.01;

  SUBCASE("zero deviation holds") {
    const auto d = petm_a_evaluate(st, cfg, 0.05, period);
    CHECK_FALSE(d.fire);
    CHECK(d.f_s == doctest::Approx(-2.0 * std::exp(-0.05)));
    CHECK(d.f_v == doctest::Approx(-2.0 * std::exp(-0.05)));
  }

  SUBCASE("deviation exactly at the threshold holds (strict inequality)") {
    const double tau = 0.02;
    st.v_hat = Vector::Zero(2);
    st.v_hat(0) = cfg.iota_v * std::exp(-cfg.gamma_v * tau);
    const auto d = petm_a_evaluate(st, cfg, tau, period);
    CHECK(d.f_v == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_FALSE(d.fire);
  }

  SUBCASE("or-mode fires on a single exceeded condition") {
    st.v_hat = Vector::Constant(2, 10.0);
    const auto d = petm_a_evaluate(st, cfg, 0.02, period);
    CHECK(d.fire);
    CHECK(d.f_v > 0.0);
    CHECK(d.f_s < 0.0);

    cfg.combine_mode = CombineMode::And;
    CHECK_FALSE(petm_a_evaluate(st, cfg, 0.02, period).fire);
  }

  SUBCASE("off-grid evaluation is rejected") {
    CHECK_THROWS_AS(petm_a_evaluate(st, cfg, 0.015, period), std::invalid_argument);
  }

  SUBCASE("evaluation must follow the anchor") {
    st.anchor_time = 0.05;
    CHECK_THROWS_AS(petm_a_evaluate(st, cfg, 0.05, period), std::invalid_argument);
  }
}

TEST_CASE("trigger count never decreases for tighter thresholds on a frozen recording") {
  const auto doc = four_follower_document();
  const Graph g = make_graph(doc);
  const LeaderModel leader = make_leader(doc);
  const double period = 0.01;

  PetmAConfig base;  // iota 2, gamma 1
  const auto rec = record_observer_run(g, leader, base, period, 500, 4);

  const long base_count = replay_trigger_count(rec, base, period);
  CHECK(base_count > 0);

  PetmAConfig smaller_iota = base;
  smaller_iota.iota_s = smaller_iota.iota_v = 1.0;
  CHECK(replay_trigger_count(rec, smaller_iota, period) >= base_count);

  PetmAConfig larger_gamma = base;
  larger_gamma.gamma_s = larger_gamma.gamma_v = 2.0;
  CHECK(replay_trigger_count(rec, larger_gamma, period) >= base_count);
}
