#ifndef PETREG_TEST_SUPPORT_HPP
#define PETREG_TEST_SUPPORT_HPP

#include <Eigen/Dense>
#include <random>

#include "petreg/graph.hpp"
#include "petreg/matrix_ops.hpp"

namespace petreg::testing {

inline Matrix random_matrix(std::mt19937& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = scale * dist(rng);
  return m;
}

/// Random matrix rescaled so its spectral norm is at most max_norm.
inline Matrix random_matrix_with_norm(std::mt19937& rng, int n, double max_norm) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  Matrix m = random_matrix(rng, n, n);
  return m * (max_norm * unif(rng) / spectral_norm(m));
}

/// Random matrix shifted so every eigenvalue real part is below -margin.
inline Matrix random_hurwitz(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> margin(0.1, 2.0);
  Matrix m = random_matrix(rng, n, n);
  Eigen::EigenSolver<Matrix> es(m, false);
  return m - (es.eigenvalues().real().maxCoeff() + margin(rng)) * Matrix::Identity(n, n);
}

inline Matrix random_skew(std::mt19937& rng, int n, double max_norm) {
  Matrix m = random_matrix(rng, n, n);
  Matrix s = (m - m.transpose()) / 2.0;
  const double norm = spectral_norm(s);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  return s * (max_norm * unif(rng) / norm);
}

/// Random directed follower graph guaranteed to have a spanning tree rooted
/// at the leader: node 1 is pinned, every later node receives from an earlier
/// one, then extra edges are sprinkled in.
inline Graph random_spanning_graph(std::mt19937& rng, int n) {
  Graph g;
  g.adjacency = Matrix::Zero(n, n);
  g.pinning = Vector::Zero(n);
  g.pinning(0) = 1.0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    g.adjacency(i, parent(rng)) = 1.0;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && unif(rng) < 0.25) g.adjacency(i, j) = 1.0;
  return g;
}

}  // namespace petreg::testing

#endif  // PETREG_TEST_SUPPORT_HPP
