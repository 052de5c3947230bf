#include "petreg/graph.hpp"

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace petreg {

void Graph::validate() const {
  if (adjacency.rows() == 0 || adjacency.rows() != adjacency.cols())
    throw std::invalid_argument("Graph: adjacency must be square and non-empty");
  if (pinning.size() != adjacency.rows())
    throw std::invalid_argument("Graph: pinning length must match follower count");
  for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
    if (adjacency(i, i) != 0.0)
      throw std::invalid_argument("Graph: self-loops are not allowed");
    for (Eigen::Index j = 0; j < adjacency.cols(); ++j)
      if (adjacency(i, j) != 0.0 && adjacency(i, j) != 1.0)
        throw std::invalid_argument("Graph: adjacency entries must be 0 or 1");
  }
  for (Eigen::Index i = 0; i < pinning.size(); ++i)
    if (pinning(i) != 0.0 && pinning(i) != 1.0)
      throw std::invalid_argument("Graph: pinning entries must be 0 or 1");
}

Matrix build_h(const Graph& g) {
  g.validate();
  const Matrix& w = g.adjacency;
  Matrix laplacian = Matrix(w.rowwise().sum().asDiagonal()) - w;
  return laplacian + Matrix(g.pinning.asDiagonal());
}

bool check_spanning_tree(const Graph& g) {
  g.validate();
  const int n = g.follower_count();
  std::vector<char> reached(n, 0);
  std::queue<int> frontier;
  for (int i = 0; i < n; ++i) {
    if (g.pinning(i) == 1.0) {
      reached[i] = 1;
      frontier.push(i);
    }
  }
  while (!frontier.empty()) {
    const int j = frontier.front();
    frontier.pop();
    // i receives from j whenever adjacency(i, j) = 1
    for (int i = 0; i < n; ++i) {
      if (!reached[i] && g.adjacency(i, j) == 1.0) {
        reached[i] = 1;
        frontier.push(i);
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (!reached[i]) return false;
  return true;
}

Matrix solve_p(const Matrix& h) {
  if (!is_hurwitz(Matrix(-h)))
    throw std::invalid_argument(
        "solve_p: -H is not Hurwitz; run check_spanning_tree on the graph first");
  return solve_sym_lyapunov(h, 2.0);
}

double observer_period_bound(const Graph& g, double mu1, double mu2) {
  if (mu1 <= 0.0 || mu2 <= 0.0)
    throw std::invalid_argument("observer_period_bound: gains must be positive");
  const Matrix h = build_h(g);
  const Matrix p = solve_p(h);
  const double mu_max = std::max(mu1, mu2);
  return 1.0 / (mu_max * (spectral_norm(Matrix(p * h)) + 1.0) * spectral_norm(h));
}

double round_period_below(double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("round_period_below: bound must be positive");
  const double exponent = std::floor(std::log10(bound));
  double step = std::pow(10.0, exponent);
  double candidate = std::floor(bound / step) * step;
  while (candidate >= bound) candidate -= step;
  if (candidate <= 0.0) candidate = std::pow(10.0, exponent - 1.0) * 9.0;
  return candidate;
}

}  // namespace petreg
