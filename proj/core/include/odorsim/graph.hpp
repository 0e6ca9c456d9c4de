#pragma once

#include <odorsim/types.hpp>

#include <stdexcept>
#include <vector>

namespace odorsim::graph {

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Directed weighted edge: `receiver` listens to `sender` (a(receiver, sender) > 0).
struct Edge {
  int receiver = 0;
  int sender = 0;
  double weight = 1.0;
};

/// Interaction topology. weights(i, j) = a(i, j) is the weight with which
/// agent i receives information from agent j. The virtual leader is not a
/// vertex; leader_flags[i] marks agents that hear it directly.
struct Digraph {
  int n_agents = 0;
  Mat weights;
  std::vector<bool> leader_flags;

  static Digraph from_edges(int n_agents, const std::vector<Edge>& edges,
                            const std::vector<int>& leaders);

  /// Throws GraphError on size mismatch, negative weights or self loops.
  void validate() const;
};

struct GraphMatrices {
  Mat adjacency;  // A
  Mat degree;     // D, diagonal of row sums of A
  Mat laplacian;  // L = D - A
  Mat incidence;  // B, diagonal 0/1 leader links
  Mat coupling;   // H = L + B
};

GraphMatrices build_matrices(const Digraph& g);

/// True iff every vertex is reachable from `root` along information flow
/// (j -> i whenever a(i, j) > 0).
bool has_spanning_tree(const Digraph& g, int root);

/// Spanning-tree test rooted at the virtual leader, which feeds every agent
/// with leader_flags set.
bool has_leader_spanning_tree(const Digraph& g);

inline constexpr double kPivotTolerance = 1e-12;

/// Rank by Gaussian elimination with partial pivoting; pivots with
/// magnitude <= tol count as zero.
int matrix_rank(const Mat& m, double tol = kPivotTolerance);

/// Determinant by the same elimination (sign tracked over row swaps).
double determinant(const Mat& m);

bool h_is_nonsingular(const GraphMatrices& m);

}  // namespace odorsim::graph
