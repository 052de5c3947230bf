#ifndef PETREG_PLANT_HPP
#define PETREG_PLANT_HPP

#include <Eigen/Dense>

#include "petreg/matrix_ops.hpp"

namespace petreg {

/// Autonomous exosystem v' = S v generating references and disturbances.
/// S must be skew-symmetric (neutrally stable normal form).
struct LeaderModel {
  Matrix s_matrix;
  Vector v0;

  int state_dim() const { return static_cast<int>(s_matrix.rows()); }
  void validate() const;
};

/// Follower LTI dynamics
///   x' = A x + B u + E v,   e = C x + D u + F v,   y_m = C_m x + D_m u + F_m v.
struct FollowerModel {
  Matrix a, b, c, d, e, f, c_m, d_m, f_m;
  Vector x0;

  int state_dim() const { return static_cast<int>(a.rows()); }
  int input_dim() const { return static_cast<int>(b.cols()); }
  int error_dim() const { return static_cast<int>(c.rows()); }
  int output_dim() const { return static_cast<int>(c_m.rows()); }

  /// Checks dimension conformance of all nine matrices against leader_dim.
  void validate(int leader_dim) const;
};

/// Solution (X, U) of the regulator equations
///   X S = A X + B U + E,   0 = C X + D U + F.
struct RegulatorSolution {
  Matrix x_sol;
  Matrix u_sol;
};

/// v(t) = exp(S t) v0 for t >= 0.
Vector leader_flow(const LeaderModel& m, double t);

Vector follower_derivative(const FollowerModel& m, const Vector& x, const Vector& u,
                           const Vector& v);
Vector regulation_error(const FollowerModel& m, const Vector& x, const Vector& u,
                        const Vector& v);
Vector measurement(const FollowerModel& m, const Vector& x, const Vector& u, const Vector& v);

/// The linear operator mapping vec(col(X, U)) to the stacked regulator
/// equation residual terms: S^T (x) [I 0; 0 0] - I (x) [A B; C D].
Matrix regulator_operator(const FollowerModel& m, const Matrix& s);

/// Right-hand side vec(col(E, F)) of the vectorised regulator equations.
Vector regulator_rhs(const FollowerModel& m);

/// Dense solve of the vectorised regulator equations. Requires the operator
/// to be square and nonsingular (the transmission-zero condition).
RegulatorSolution solve_regulator_direct(const FollowerModel& m, const Matrix& s);

/// Splits a stacked solution estimate chi = vec(col(X, U)) back into (X, U).
RegulatorSolution unpack_regulator(const Vector& chi, const FollowerModel& m, int leader_dim);

/// Gradient-flow derivative -kappa * Ahat^T (Ahat chi - beta), where Ahat is
/// the regulator operator built from the current estimate s_hat.
Vector adaptive_regulator_step(const Vector& chi_hat, const Matrix& s_hat,
                               const FollowerModel& m, double kappa);

}  // namespace petreg

#endif  // PETREG_PLANT_HPP
