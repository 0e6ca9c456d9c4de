#include <odorsim/graph.hpp>

#include <cmath>
#include <deque>
#include <string>
#include <utility>

namespace odorsim::graph {

Digraph Digraph::from_edges(int n_agents, const std::vector<Edge>& edges,
                            const std::vector<int>& leaders) {
  if (n_agents <= 0) throw GraphError("n_agents must be positive");
  Digraph g;
  g.n_agents = n_agents;
  g.weights = Mat::Zero(n_agents, n_agents);
  g.leader_flags.assign(static_cast<std::size_t>(n_agents), false);
  for (const auto& e : edges) {
    if (e.receiver < 0 || e.receiver >= n_agents || e.sender < 0 ||
        e.sender >= n_agents) {
      throw GraphError("edge endpoint out of range: " +
                       std::to_string(e.receiver) + " <- " +
                       std::to_string(e.sender));
    }
    g.weights(e.receiver, e.sender) = e.weight;
  }
  for (int l : leaders) {
    if (l < 0 || l >= n_agents) {
      throw GraphError("leader index out of range: " + std::to_string(l));
    }
    g.leader_flags[static_cast<std::size_t>(l)] = true;
  }
  g.validate();
  return g;
}

void Digraph::validate() const {
  if (n_agents <= 0) throw GraphError("n_agents must be positive");
  if (weights.rows() != n_agents || weights.cols() != n_agents) {
    throw GraphError("weight matrix must be n_agents x n_agents");
  }
  if (leader_flags.size() != static_cast<std::size_t>(n_agents)) {
    throw GraphError("leader_flags must have n_agents entries");
  }
  for (int i = 0; i < n_agents; ++i) {
    if (weights(i, i) != 0.0) {
      throw GraphError("self loop on agent " + std::to_string(i));
    }
    for (int j = 0; j < n_agents; ++j) {
      if (!std::isfinite(weights(i, j)) || weights(i, j) < 0.0) {
        throw GraphError("negative or non-finite weight a(" +
                         std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

GraphMatrices build_matrices(const Digraph& g) {
  g.validate();
  const int n = g.n_agents;
  GraphMatrices m;
  m.adjacency = g.weights;
  m.degree = Mat::Zero(n, n);
  m.incidence = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    for (int j = 0; j < n; ++j) d += g.weights(i, j);
    m.degree(i, i) = d;
    m.incidence(i, i) = g.leader_flags[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  }
  m.laplacian = m.degree - m.adjacency;
  m.coupling = m.laplacian + m.incidence;
  return m;
}

namespace {

// BFS over information flow; `seeds` are vertices fed directly by the root.
bool reaches_all(const Digraph& g, const std::vector<int>& seeds) {
  const int n = g.n_agents;
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<int> frontier;
  for (int s : seeds) {
    if (!seen[static_cast<std::size_t>(s)]) {
      seen[static_cast<std::size_t>(s)] = true;
      frontier.push_back(s);
    }
  }
  while (!frontier.empty()) {
    const int j = frontier.front();
    frontier.pop_front();
    for (int i = 0; i < n; ++i) {
      if (g.weights(i, j) > 0.0 && !seen[static_cast<std::size_t>(i)]) {
        seen[static_cast<std::size_t>(i)] = true;
        frontier.push_back(i);
      }
    }
  }
  for (bool v : seen) {
    if (!v) return false;
  }
  return true;
}

// Row echelon reduction in place; returns (rank, determinant).
std::pair<int, double> eliminate(Mat a, double tol) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  int rank = 0;
  double det = 1.0;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < cols && row < rows; ++col) {
    Eigen::Index pivot = row;
    for (Eigen::Index r = row + 1; r < rows; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (std::abs(a(pivot, col)) <= tol) {
      det = 0.0;
      continue;
    }
    if (pivot != row) {
      a.row(pivot).swap(a.row(row));
      det = -det;
    }
    det *= a(row, col);
    for (Eigen::Index r = row + 1; r < rows; ++r) {
      const double factor = a(r, col) / a(row, col);
      a.row(r) -= factor * a.row(row);
    }
    ++row;
    ++rank;
  }
  if (rows != cols || rank < rows) det = 0.0;
  return {rank, det};
}

}  // namespace

bool has_spanning_tree(const Digraph& g, int root) {
  if (root < 0 || root >= g.n_agents) {
    throw GraphError("root out of range: " + std::to_string(root));
  }
  return reaches_all(g, {root});
}

bool has_leader_spanning_tree(const Digraph& g) {
  std::vector<int> seeds;
  for (int i = 0; i < g.n_agents; ++i) {
    if (g.leader_flags[static_cast<std::size_t>(i)]) seeds.push_back(i);
  }
  if (seeds.empty()) return false;
  return reaches_all(g, seeds);
}

int matrix_rank(const Mat& m, double tol) { return eliminate(m, tol).first; }

double determinant(const Mat& m) {
  if (m.rows() != m.cols()) throw GraphError("determinant of non-square matrix");
  if (m.rows() == 0) return 1.0;
  return eliminate(m, 0.0).second;
}

bool h_is_nonsingular(const GraphMatrices& m) {
  return m.coupling.rows() > 0 &&
         matrix_rank(m.coupling) == static_cast<int>(m.coupling.rows());
}

}  // namespace odorsim::graph
