#ifndef PETREG_CONTROLLER_HPP
#define PETREG_CONTROLLER_HPP

#include <Eigen/Dense>

#include "petreg/plant.hpp"

// Event-triggered dynamic output-feedback controller per follower: the control
// law and its internal state observer, the sensor-side psi signal, the PETM-B
// and PETM-C trigger rules, the admissible sensor-period bounds, and the
// steady-state regulation-error bound chain.

namespace petreg {

/// Stabilising gains: a + b*k and a + l*c_m must both be Hurwitz.
struct FollowerGains {
  Matrix k;  // n_u x n state feedback
  Matrix l;  // n x n_y output injection
};

/// Local sampler snapshot, refreshed at every sensor sampling instant.
struct SampledCache {
  Vector x_hat;
  Vector omega;
  Vector v_bar;
  double time = 0.0;
  bool fresh = false;
};

struct ControllerState {
  Vector x_hat;             // internal state estimate
  Vector chi_hat;           // adaptive regulator estimate, vec(col(X_hat, U_hat))
  Vector psi_held;          // psi transmitted at the last PETM-B instant
  double psi_anchor_time = 0.0;
  Vector y_m_held;          // measurement at the last PETM-B instant (variant trigger)
  Vector omega_held;        // control value applied by the actuator (PETM-C)
  double omega_anchor_time = 0.0;
  SampledCache cache;

  static ControllerState zero(const FollowerModel& m, int leader_dim);
};

struct TriggerConfig {
  double iota_psi = 2.0;
  double gamma_psi = 1.0;
  double iota_psi_bar = 0.0;   // only active when petm_c_enabled
  double iota_omega = 2.0;
  double gamma_omega = 1.0;
  double iota_omega_bar = 0.0;
  double sigma = 1.0;
  double rho = 1.0;
  bool petm_c_enabled = false;
  bool variant_e = false;      // trigger PETM-B on the raw measurement instead of psi
};

/// Design constants for the steady-state error bound chain.
struct BoundParams {
  double zeta1 = 0.4;
  double zeta2 = 1.0;  // leader rate constant; 0 for a constant leader
  double zeta3 = 0.4;
  double epsilon = 0.01;
};

struct TriggerDecision {
  bool fire;
  double f_value;
};

enum class SensorPeriodMode { B, C };

/// omega = K x_hat + (U_hat - K X_hat) v_hat, with (X_hat, U_hat) unpacked
/// from the adaptive regulator estimate chi_hat.
Vector control_signal(const ControllerState& st, const FollowerModel& m,
                      const FollowerGains& gains, const Vector& v_hat);

/// Internal observer derivative
///   x_hat' = A x_hat + B omega + E v_hat
///          + L (C_m x_hat(tau_p) + D_m omega(tau_p))
///          + L (rho F + (1 - sigma) F_m) v_bar(tau_p)
///          + L psi_held,
/// with the sampled quantities read from the cache.
Vector controller_observer_derivative(const ControllerState& st, const FollowerModel& m,
                                      const FollowerGains& gains, const TriggerConfig& trig,
                                      const Vector& v_hat, double t);

/// psi = sigma F_m v_bar - rho F v_bar - y_m.
Vector psi_signal(const FollowerModel& m, const TriggerConfig& trig, const Vector& v_bar,
                  const Vector& y_m);

/// Sensor-to-controller trigger at a sensor-grid instant. Fires iff the held
/// transmission deviates strictly past the (decaying, optionally offset)
/// threshold; the variant rule monitors y_m instead of psi.
TriggerDecision petm_b_evaluate(const ControllerState& st, const TriggerConfig& trig, double tau,
                                const Vector& psi_now, const Vector& y_m_now,
                                double sensor_period, double sensor_phase = 0.0);

/// Controller-to-actuator trigger on the period-aligned grid.
TriggerDecision petm_c_evaluate(const ControllerState& st, const TriggerConfig& trig, double tau,
                                const Vector& omega_now, double sensor_period);

/// Largest admissible sensor sampling period. Mode B solves
/// ||Q L C_m|| d3 / (1 - d3) < 1 with d3(T) = T ||A + L C_m|| exp(||A|| T);
/// mode C additionally imposes the analogous constraint with R, B, K and
/// returns the smaller of the two. Bisection on [1e-6, 10], 60 iterations.
double sensor_period_bound(const FollowerModel& m, const Matrix& k_gain, const Matrix& l_gain,
                           SensorPeriodMode mode);

/// Steady-state regulation-error bound as a function of the PETM-B/PETM-C
/// threshold offsets and the sensor period. Zero at (0, 0, 0), increasing in
/// each argument; throws InfeasibleParametersError when the design constants
/// violate a feasibility inequality (the message names it).
double steady_error_bound(const FollowerModel& m, const Matrix& k_gain, const Matrix& l_gain,
                          const Matrix& u_sol, const TriggerConfig& trig, const BoundParams& bp,
                          double sensor_period);

}  // namespace petreg

#endif  // PETREG_CONTROLLER_HPP
