#include "petreg/plant.hpp"

#include <stdexcept>

namespace petreg {

namespace {

void require_dims(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void LeaderModel::validate() const {
  require_dims(s_matrix.rows() > 0 && s_matrix.rows() == s_matrix.cols(),
               "LeaderModel: S must be square and non-empty");
  require_dims(v0.size() == s_matrix.rows(), "LeaderModel: v0 length must match S");
  if (!check_neutral_stability(s_matrix))
    throw std::invalid_argument("LeaderModel: S must be skew-symmetric (neutrally stable)");
}

void FollowerModel::validate(int leader_dim) const {
  const int n = state_dim();
  const int nu = input_dim();
  const int ne = error_dim();
  const int ny = output_dim();
  require_dims(n > 0 && a.cols() == n, "FollowerModel: A must be square");
  require_dims(b.rows() == n && nu > 0, "FollowerModel: B must be n x n_u");
  require_dims(c.cols() == n && ne > 0, "FollowerModel: C must be n_e x n");
  require_dims(d.rows() == ne && d.cols() == nu, "FollowerModel: D must be n_e x n_u");
  require_dims(e.rows() == n && e.cols() == leader_dim, "FollowerModel: E must be n x n_v");
  require_dims(f.rows() == ne && f.cols() == leader_dim, "FollowerModel: F must be n_e x n_v");
  require_dims(c_m.cols() == n && ny > 0, "FollowerModel: C_m must be n_y x n");
  require_dims(d_m.rows() == ny && d_m.cols() == nu, "FollowerModel: D_m must be n_y x n_u");
  require_dims(f_m.rows() == ny && f_m.cols() == leader_dim,
               "FollowerModel: F_m must be n_y x n_v");
  require_dims(x0.size() == n, "FollowerModel: x0 length must match state dimension");
}

Vector leader_flow(const LeaderModel& m, double t) {
  if (t < 0.0) throw std::invalid_argument("leader_flow: t must be non-negative");
  return mat_exp(Matrix(m.s_matrix * t)) * m.v0;
}

Vector follower_derivative(const FollowerModel& m, const Vector& x, const Vector& u,
                           const Vector& v) {
  if (x.size() != m.state_dim() || u.size() != m.input_dim() || v.size() != m.e.cols())
    throw std::invalid_argument("follower_derivative: dimension mismatch");
  return m.a * x + m.b * u + m.e * v;
}

Vector regulation_error(const FollowerModel& m, const Vector& x, const Vector& u,
                        const Vector& v) {
  if (x.size() != m.state_dim() || u.size() != m.input_dim() || v.size() != m.f.cols())
    throw std::invalid_argument("regulation_error: dimension mismatch");
  return m.c * x + m.d * u + m.f * v;
}

Vector measurement(const FollowerModel& m, const Vector& x, const Vector& u, const Vector& v) {
  if (x.size() != m.state_dim() || u.size() != m.input_dim() || v.size() != m.f_m.cols())
    throw std::invalid_argument("measurement: dimension mismatch");
  return m.c_m * x + m.d_m * u + m.f_m * v;
}

Matrix regulator_operator(const FollowerModel& m, const Matrix& s) {
  const int n = m.state_dim();
  const int nu = m.input_dim();
  const int ne = m.error_dim();
  Matrix selector = Matrix::Zero(n + ne, n + nu);
  selector.topLeftCorner(n, n) = Matrix::Identity(n, n);
  Matrix system = Matrix::Zero(n + ne, n + nu);
  system.topLeftCorner(n, n) = m.a;
  system.topRightCorner(n, nu) = m.b;
  system.bottomLeftCorner(ne, n) = m.c;
  system.bottomRightCorner(ne, nu) = m.d;
  const Matrix ident = Matrix::Identity(s.rows(), s.cols());
  return kron(s.transpose(), selector) - kron(ident, system);
}

Vector regulator_rhs(const FollowerModel& m) {
  Matrix stacked(m.e.rows() + m.f.rows(), m.e.cols());
  stacked << m.e, m.f;
  return vec_mat(stacked);
}

RegulatorSolution solve_regulator_direct(const FollowerModel& m, const Matrix& s) {
  const Matrix op = regulator_operator(m, s);
  if (op.rows() != op.cols())
    throw std::invalid_argument(
        "solve_regulator_direct: operator not square (error and input dimensions differ)");
  Eigen::FullPivLU<Matrix> lu(op);
  if (!lu.isInvertible())
    throw NoSolutionError("solve_regulator_direct: regulator equations have no unique solution");
  const Vector chi = lu.solve(regulator_rhs(m));
  RegulatorSolution sol = unpack_regulator(chi, m, static_cast<int>(s.rows()));

  const double res1 = (sol.x_sol * s - m.a * sol.x_sol - m.b * sol.u_sol - m.e).norm();
  const double res2 = (m.c * sol.x_sol + m.d * sol.u_sol + m.f).norm();
  if (res1 > 1e-9 || res2 > 1e-9)
    throw NoSolutionError("solve_regulator_direct: residual above tolerance");
  return sol;
}

RegulatorSolution unpack_regulator(const Vector& chi, const FollowerModel& m, int leader_dim) {
  const int n = m.state_dim();
  const int nu = m.input_dim();
  if (chi.size() != static_cast<Eigen::Index>(n + nu) * leader_dim)
    throw std::invalid_argument("unpack_regulator: chi length mismatch");
  const Matrix stacked = Eigen::Map<const Matrix>(chi.data(), n + nu, leader_dim);
  return RegulatorSolution{stacked.topRows(n), stacked.bottomRows(nu)};
}

Vector adaptive_regulator_step(const Vector& chi_hat, const Matrix& s_hat,
                               const FollowerModel& m, double kappa) {
  if (kappa <= 0.0) throw std::invalid_argument("adaptive_regulator_step: kappa must be positive");
  const Matrix op = regulator_operator(m, s_hat);
  if (chi_hat.size() != op.cols())
    throw std::invalid_argument("adaptive_regulator_step: chi length mismatch");
  return -kappa * op.transpose() * (op * chi_hat - regulator_rhs(m));
}

}  // namespace petreg
