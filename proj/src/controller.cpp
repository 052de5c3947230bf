#include "petreg/controller.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace petreg {

namespace {

bool on_grid(double tau, double period, double phase) {
  const double ratio = (tau - phase) / period;
  return ratio > -1e-9 && std::abs(ratio - std::round(ratio)) <= 1e-9;
}

double lambda_min_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvalues().minCoeff();
}

double lambda_max_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvalues().maxCoeff();
}

// d(T) = T * gain_norm * exp(a_norm * T), strictly increasing in T.
double hold_growth(double period, double gain_norm, double a_norm) {
  return period * gain_norm * std::exp(a_norm * period);
}

// Largest T in [1e-6, 10] with hold_growth(T) < 1 / (1 + loop_norm).
double bisect_period(double loop_norm, double gain_norm, double a_norm) {
  const double target = 1.0 / (1.0 + loop_norm);
  double lo = 1e-6, hi = 10.0;
  if (hold_growth(hi, gain_norm, a_norm) < target) return hi;
  if (hold_growth(lo, gain_norm, a_norm) >= target)
    throw InfeasibleParametersError(
        "sensor_period_bound: no admissible period above 1e-6 s");
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hold_growth(mid, gain_norm, a_norm) < target)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

ControllerState ControllerState::zero(const FollowerModel& m, int leader_dim) {
  ControllerState st;
  st.x_hat = Vector::Zero(m.state_dim());
  st.chi_hat = Vector::Zero(static_cast<Eigen::Index>(m.state_dim() + m.input_dim()) * leader_dim);
  st.psi_held = Vector::Zero(m.output_dim());
  st.y_m_held = Vector::Zero(m.output_dim());
  st.omega_held = Vector::Zero(m.input_dim());
  st.cache.x_hat = Vector::Zero(m.state_dim());
  st.cache.omega = Vector::Zero(m.input_dim());
  st.cache.v_bar = Vector::Zero(leader_dim);
  return st;
}

Vector control_signal(const ControllerState& st, const FollowerModel& m,
                      const FollowerGains& gains, const Vector& v_hat) {
  const RegulatorSolution sol =
      unpack_regulator(st.chi_hat, m, static_cast<int>(v_hat.size()));
  if (st.x_hat.size() != m.state_dim())
    throw std::invalid_argument("control_signal: state dimension mismatch");
  return gains.k * st.x_hat + (sol.u_sol - gains.k * sol.x_sol) * v_hat;
}

Vector controller_observer_derivative(const ControllerState& st, const FollowerModel& m,
                                      const FollowerGains& gains, const TriggerConfig& trig,
                                      const Vector& v_hat, double t) {
  if (!st.cache.fresh)
    throw std::logic_error("controller_observer_derivative: sampled cache not initialised");
  if (st.cache.time > t)
    throw std::logic_error("controller_observer_derivative: sampled cache is from the future");
  const Vector omega = control_signal(st, m, gains, v_hat);
  return m.a * st.x_hat + m.b * omega + m.e * v_hat +
         gains.l * (m.c_m * st.cache.x_hat + m.d_m * st.cache.omega) +
         gains.l * (trig.rho * m.f * st.cache.v_bar +
                    (1.0 - trig.sigma) * m.f_m * st.cache.v_bar) +
         gains.l * st.psi_held;
}

Vector psi_signal(const FollowerModel& m, const TriggerConfig& trig, const Vector& v_bar,
                  const Vector& y_m) {
  if (v_bar.size() != m.f.cols() || y_m.size() != m.output_dim())
    throw std::invalid_argument("psi_signal: dimension mismatch");
  return trig.sigma * m.f_m * v_bar - trig.rho * m.f * v_bar - y_m;
}

TriggerDecision petm_b_evaluate(const ControllerState& st, const TriggerConfig& trig, double tau,
                                const Vector& psi_now, const Vector& y_m_now,
                                double sensor_period, double sensor_phase) {
  if (sensor_period <= 0.0)
    throw std::invalid_argument("petm_b_evaluate: sensor_period must be positive");
  if (!on_grid(tau, sensor_period, sensor_phase))
    throw std::invalid_argument("petm_b_evaluate: tau is not on the sensor grid");
  if (tau <= st.psi_anchor_time)
    throw std::invalid_argument("petm_b_evaluate: tau must follow the last transmission");

  const double offset = trig.petm_c_enabled ? trig.iota_psi_bar : 0.0;
  const double threshold = trig.iota_psi * std::exp(-trig.gamma_psi * tau) + offset;
  const double deviation = trig.variant_e ? (y_m_now - st.y_m_held).norm()
                                          : (psi_now - st.psi_held).norm();
  const double f = deviation - threshold;
  return TriggerDecision{f > 0.0, f};
}

TriggerDecision petm_c_evaluate(const ControllerState& st, const TriggerConfig& trig, double tau,
                                const Vector& omega_now, double sensor_period) {
  if (!trig.petm_c_enabled)
    throw std::logic_error("petm_c_evaluate: PETM-C is disabled in this configuration");
  if (sensor_period <= 0.0)
    throw std::invalid_argument("petm_c_evaluate: sensor_period must be positive");
  if (!on_grid(tau, sensor_period, 0.0))
    throw std::invalid_argument("petm_c_evaluate: tau is not on the actuation grid");
  if (tau <= st.omega_anchor_time)
    throw std::invalid_argument("petm_c_evaluate: tau must follow the last transmission");

  const double threshold =
      trig.iota_omega * std::exp(-trig.gamma_omega * tau) + trig.iota_omega_bar;
  const double f = (omega_now - st.omega_held).norm() - threshold;
  return TriggerDecision{f > 0.0, f};
}

double sensor_period_bound(const FollowerModel& m, const Matrix& k_gain, const Matrix& l_gain,
                           SensorPeriodMode mode) {
  const Matrix alc = m.a + l_gain * m.c_m;
  if (!is_hurwitz(alc))
    throw std::invalid_argument("sensor_period_bound: a + l*c_m is not Hurwitz");
  const double a_norm = spectral_norm(m.a);

  const Matrix q = solve_sym_lyapunov(alc, -2.0);
  const double bound_b =
      bisect_period(spectral_norm(Matrix(q * l_gain * m.c_m)), spectral_norm(alc), a_norm);
  if (mode == SensorPeriodMode::B) return bound_b;

  const Matrix abk = m.a + m.b * k_gain;
  if (!is_hurwitz(abk))
    throw std::invalid_argument("sensor_period_bound: a + b*k is not Hurwitz");
  const Matrix r = solve_sym_lyapunov(abk, -2.0);
  const double bound_c =
      bisect_period(spectral_norm(Matrix(r * m.b * k_gain)), spectral_norm(abk), a_norm);
  return std::min(bound_b, bound_c);
}

double steady_error_bound(const FollowerModel& m, const Matrix& k_gain, const Matrix& l_gain,
                          const Matrix& u_sol, const TriggerConfig& trig, const BoundParams& bp,
                          double sensor_period) {
  if (sensor_period < 0.0)
    throw std::invalid_argument("steady_error_bound: sensor_period must be non-negative");
  if (bp.zeta1 <= 0.0 || bp.zeta3 <= 0.0 || bp.zeta2 < 0.0 || bp.epsilon <= 0.0)
    throw std::invalid_argument("steady_error_bound: invalid design constants");

  const Matrix alc = m.a + l_gain * m.c_m;
  const Matrix abk = m.a + m.b * k_gain;
  if (!is_hurwitz(alc) || !is_hurwitz(abk))
    throw std::invalid_argument("steady_error_bound: closed loops are not Hurwitz");

  const Matrix q = solve_sym_lyapunov(alc, -2.0);
  const Matrix r = solve_sym_lyapunov(abk, -2.0);

  const double a_norm = spectral_norm(m.a);
  const double d3 = hold_growth(sensor_period, spectral_norm(alc), a_norm);
  const double d4 = hold_growth(sensor_period, spectral_norm(abk), a_norm);
  if (d3 >= 1.0 || d4 >= 1.0)
    throw InfeasibleParametersError(
        "steady_error_bound: hold growth factor reaches 1 at this period");
  const double dev_x_tilde = d3 / (1.0 - d3);
  const double dev_x_bar = d4 / (1.0 - d4);

  const double n_qlc = spectral_norm(Matrix(q * l_gain * m.c_m));
  const double n_ql = spectral_norm(Matrix(q * l_gain));
  const double n_rbk = spectral_norm(Matrix(r * m.b * k_gain));
  const double n_r = spectral_norm(r);
  const double n_k = spectral_norm(k_gain);
  const double n_u = spectral_norm(u_sol);

  const double den_q = 1.0 - n_qlc * dev_x_tilde - bp.zeta1 - bp.epsilon;
  if (den_q <= 0.0)
    throw InfeasibleParametersError(
        "steady_error_bound: ||Q L C_m||*d3/(1-d3) + zeta1 + epsilon >= 1");
  const double den_r = 1.0 - n_rbk * dev_x_bar - bp.zeta3 - bp.epsilon;
  if (den_r <= 0.0)
    throw InfeasibleParametersError(
        "steady_error_bound: ||R B K||*d4/(1-d4) + zeta3 + epsilon >= 1");

  const double phi1 = sensor_period * spectral_norm(l_gain) * trig.iota_psi_bar *
                      std::exp(a_norm * sensor_period) / (1.0 - d3);
  const double phi2 = std::pow(n_qlc * phi1 + n_ql * trig.iota_psi_bar, 2) / (4.0 * bp.zeta1);
  const double phi3 = lambda_max_sym(q) * phi2 / (lambda_min_sym(q) * den_q);
  const double phi4 = n_k * phi3 + trig.iota_omega_bar + n_u * bp.zeta2 * sensor_period;
  const double phi5 = sensor_period * std::exp(a_norm * sensor_period) * phi4 / (1.0 - d4);
  const double phi6 = std::pow(n_rbk * phi5 + n_r * phi4, 2) / (4.0 * bp.zeta3);
  const double phi7 = std::sqrt(lambda_max_sym(r) * phi6 / (lambda_min_sym(r) * den_r));
  const double phi8 = spectral_norm(Matrix(m.c + m.d * k_gain)) * phi7 +
                      spectral_norm(Matrix(m.d * k_gain)) * phi3;
  return phi8;
}

}  // namespace petreg
