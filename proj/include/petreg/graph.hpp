#ifndef PETREG_GRAPH_HPP
#define PETREG_GRAPH_HPP

#include <Eigen/Dense>

#include "petreg/matrix_ops.hpp"

namespace petreg {

/// Directed follower communication topology plus the leader-pinning vector.
/// adjacency(i, j) = 1 iff follower i receives from follower j; pinning(i) = 1
/// iff follower i receives from the leader. Entries are restricted to {0, 1}
/// and self-loops are not allowed.
struct Graph {
  Matrix adjacency;
  Vector pinning;

  int follower_count() const { return static_cast<int>(adjacency.rows()); }

  /// Throws std::invalid_argument when the invariants are violated.
  void validate() const;
};

/// H = L + diag(pinning), with L = D - W the in-degree Laplacian of the
/// follower subgraph. -H is Hurwitz exactly when check_spanning_tree passes.
Matrix build_h(const Graph& g);

/// True iff every follower is reachable from the leader along directed edges.
bool check_spanning_tree(const Graph& g);

/// Symmetric positive-definite P with P*H + H^T*P = 2I. Requires -H Hurwitz.
Matrix solve_p(const Matrix& h);

/// Supremum of admissible communication sampling periods,
/// 1 / (max(mu1, mu2) * (||P H|| + 1) * ||H||). Any period strictly below the
/// returned value keeps the sampled consensus contraction argument valid.
double observer_period_bound(const Graph& g, double mu1, double mu2);

/// Largest single-significant-digit decimal (d * 10^k, d in 1..9) strictly
/// below the given bound. Convenience for writing round periods into configs.
double round_period_below(double bound);

}  // namespace petreg

#endif  // PETREG_GRAPH_HPP
