#ifndef PETREG_SCENARIO_FIXTURES_HPP
#define PETREG_SCENARIO_FIXTURES_HPP

#include "petreg/scenario.hpp"

namespace petreg::testing {

/// The four-follower benchmark scenario: harmonic leader, damped
/// double-integrator followers tracking the leader's first coordinate,
/// topology 1->2, 1->3, 2->4, 3->4 with follower 1 pinned.
inline ScenarioDocument four_follower_document() {
  ScenarioDocument doc;
  doc.edges = {{1, 2}, {1, 3}, {2, 4}, {3, 4}};
  doc.pinned = {1};

  doc.leader_s = Matrix(2, 2);
  doc.leader_s << 0, 1, -1, 0;
  doc.leader_v0 = Vector(2);
  doc.leader_v0 << 0.9, -0.5;

  const double dampings[4] = {-0.3, -0.4, -0.5, -0.4};
  const double x0s[4][2] = {{0.2, 0.3}, {0.1, 0.3}, {0.5, 0.6}, {0.8, 0.8}};
  for (int i = 0; i < 4; ++i) {
    FollowerEntry fe;
    fe.a = Matrix(2, 2);
    fe.a << 0, 1, 0, dampings[i];
    fe.b = Matrix(2, 1);
    fe.b << 0, 1;
    fe.c = Matrix(1, 2);
    fe.c << 1, 0;
    fe.d = Matrix::Zero(1, 1);
    fe.e = Matrix::Zero(2, 2);
    fe.f = Matrix(1, 2);
    fe.f << -1, 0;
    fe.c_m = Matrix(1, 2);
    fe.c_m << 1, 0;
    fe.d_m = Matrix::Zero(1, 1);
    fe.f_m = Matrix::Zero(1, 2);
    fe.x0 = Vector(2);
    fe.x0 << x0s[i][0], x0s[i][1];
    fe.k = Matrix(1, 2);
    fe.k << -5, -5;
    fe.l = Matrix(2, 1);
    fe.l << -5, -5;
    fe.sigma = 1.0;
    fe.rho = 1.0;
    doc.followers.push_back(fe);
  }

  doc.mu1 = doc.mu2 = 3.0;
  doc.iota_s = doc.iota_v = 2.0;
  doc.gamma_s = doc.gamma_v = 1.0;
  doc.combine_mode = CombineMode::Or;

  doc.iota_psi = 2.0;
  doc.gamma_psi = 1.0;
  doc.iota_psi_bar = 0.0;
  doc.iota_omega = 2.0;
  doc.gamma_omega = 1.0;
  doc.iota_omega_bar = 0.0;
  doc.kappa = 30.0;
  doc.petm_c = false;
  doc.variant_e = false;

  doc.t_end = 30.0;
  doc.comm_period = 0.01;
  doc.sensor_periods = {0.01, 0.01, 0.01, 0.01};
  doc.substeps = 4;

  doc.bound_params = BoundParams{0.4, 1.0, 0.4, 0.01};
  return doc;
}

/// Minimal one-follower scenario around a scalar-rotation-free (constant)
/// leader; handy for equilibrium and schema tests.
inline ScenarioDocument single_follower_document() {
  ScenarioDocument doc = four_follower_document();
  doc.edges.clear();
  doc.pinned = {1};
  doc.followers.resize(1);
  doc.sensor_periods = {0.01};
  doc.t_end = 2.0;
  return doc;
}

}  // namespace petreg::testing

#endif  // PETREG_SCENARIO_FIXTURES_HPP
