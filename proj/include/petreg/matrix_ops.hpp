#ifndef PETREG_MATRIX_OPS_HPP
#define PETREG_MATRIX_OPS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "petreg/errors.hpp"

// Small dense real-matrix utilities shared by every module: norms, Kronecker
// products, vectorisation, matrix exponentials, symmetric Lyapunov solves and
// stability checks. All functions are pure and take Eigen expressions.

namespace petreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace detail {

template <typename Derived>
void require_nonempty_finite(const Eigen::MatrixBase<Derived>& m, const char* op) {
  if (m.rows() == 0 || m.cols() == 0)
    throw std::invalid_argument(std::string(op) + ": dimension zero");
  if (!m.derived().allFinite())
    throw std::invalid_argument(std::string(op) + ": non-finite entries");
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* op) {
  require_nonempty_finite(m, op);
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(op) + ": matrix must be square");
}

}  // namespace detail

/// Largest singular value (the induced 2-norm).
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  detail::require_nonempty_finite(m, "spectral_norm");
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<Mat> svd(m.derived());
  return svd.singularValues()(0);
}

/// Square root of the sum of squared entries.
template <typename Derived>
typename Derived::Scalar frobenius_norm(const Eigen::MatrixBase<Derived>& m) {
  detail::require_nonempty_finite(m, "frobenius_norm");
  return m.norm();
}

/// Kronecker product, (ra*rb) x (ca*cb).
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  detail::require_nonempty_finite(a, "kron");
  detail::require_nonempty_finite(b, "kron");
  using Mat = Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b.derived();
  return out;
}

/// Columns stacked top-to-bottom into one column vector.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> vec_mat(
    const Eigen::MatrixBase<Derived>& m) {
  detail::require_nonempty_finite(m, "vec_mat");
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> tmp = m;
  return Eigen::Map<const Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>>(
      tmp.data(), tmp.size());
}

/// Matrix exponential by scaling-and-squaring around a 13th-order diagonal
/// Pade approximant. Relative accuracy is well below 1e-12 for norms up to 50.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> mat_exp(
    const Eigen::MatrixBase<Derived>& m) {
  detail::require_square(m, "mat_exp");
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  static const double pade13[] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  Mat a = m;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return Mat::Identity(a.rows(), a.cols());
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    a /= std::pow(2.0, squarings);
  }

  const Mat ident = Mat::Identity(a.rows(), a.cols());
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a2 * a4;
  const Mat u = a * (a6 * (pade13[13] * a6 + pade13[11] * a4 + pade13[9] * a2) +
                     pade13[7] * a6 + pade13[5] * a4 + pade13[3] * a2 + pade13[1] * ident);
  const Mat v = a6 * (pade13[12] * a6 + pade13[10] * a4 + pade13[8] * a2) +
                pade13[6] * a6 + pade13[4] * a4 + pade13[2] * a2 + pade13[0] * ident;

  Mat result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

/// Solves X*m + m^T*X = c*I for symmetric X by Kronecker vectorisation.
/// The operator must be nonsingular (no eigenvalue pair of m sums to zero).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> solve_sym_lyapunov(
    const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar c) {
  detail::require_square(m, "solve_sym_lyapunov");
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Eigen::Index n = m.rows();
  const Mat ident = Mat::Identity(n, n);
  // vec(X m) = (m^T (x) I) vec(X), vec(m^T X) = (I (x) m^T) vec(X)
  const Mat op = kron(m.transpose(), ident) + kron(ident, m.transpose());
  const Vec rhs = vec_mat(c * ident);

  Eigen::FullPivLU<Mat> lu(op);
  if (!lu.isInvertible())
    throw NoSolutionError("solve_sym_lyapunov: singular Lyapunov operator");
  const Vec x = lu.solve(rhs);

  Mat solution = Eigen::Map<const Mat>(x.data(), n, n);
  solution = ((solution + solution.transpose()) / Scalar(2)).eval();

  const double residual = (solution * m.derived() + m.derived().transpose() * solution -
                           c * ident).norm();
  if (residual > 1e-10 * std::max(1.0, static_cast<double>(solution.norm())))
    throw NoSolutionError("solve_sym_lyapunov: residual too large, operator nearly singular");
  return solution;
}

/// True iff every eigenvalue has real part below -1e-12.
template <typename Derived>
bool is_hurwitz(const Eigen::MatrixBase<Derived>& m) {
  detail::require_square(m, "is_hurwitz");
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::EigenSolver<Mat> es(m.derived(), /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff() < -1e-12;
}

/// True iff s is skew-symmetric within 1e-12 entrywise (the normal form of a
/// neutrally stable exosystem matrix). The zero matrix passes.
template <typename Derived>
bool check_neutral_stability(const Eigen::MatrixBase<Derived>& s) {
  detail::require_square(s, "check_neutral_stability");
  return (s.derived() + s.derived().transpose()).cwiseAbs().maxCoeff() <= 1e-12;
}

}  // namespace petreg

#endif  // PETREG_MATRIX_OPS_HPP
