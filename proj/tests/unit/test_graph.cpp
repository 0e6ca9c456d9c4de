#include <odorsim/graph.hpp>

#include <gtest/gtest.h>

#include <chrono>
#include <random>

using namespace odorsim;
using namespace odorsim::graph;

namespace {

Digraph example_topology() {
  return Digraph::from_edges(4, {{0, 2, 1.0}, {2, 1, 1.0}, {3, 2, 1.0}}, {0, 1});
}

Mat rows(std::initializer_list<std::initializer_list<double>> r) {
  Mat m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Laplace expansion along the first row; independent of the elimination code.
double cofactor_det(const Mat& m) {
  const auto n = m.rows();
  if (n == 1) return m(0, 0);
  double sum = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    if (m(0, c) == 0.0) continue;
    Mat minor(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i) {
      Eigen::Index k = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j != c) minor(i - 1, k++) = m(i, j);
      }
    }
    sum += ((c % 2 == 0) ? 1.0 : -1.0) * m(0, c) * cofactor_det(minor);
  }
  return sum;
}

}  // namespace

TEST(Graph, ExampleMatricesMatchDisplayedValues) {
  const auto m = build_matrices(example_topology());
  EXPECT_EQ(m.adjacency, rows({{0, 0, 1, 0}, {0, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}}));
  EXPECT_EQ(m.degree, rows({{1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
  EXPECT_EQ(m.laplacian, rows({{1, 0, -1, 0}, {0, 0, 0, 0}, {0, -1, 1, 0}, {0, 0, -1, 1}}));
  EXPECT_EQ(m.incidence, rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}));
  EXPECT_EQ(m.coupling, rows({{2, 0, -1, 0}, {0, 1, 0, 0}, {0, -1, 1, 0}, {0, 0, -1, 1}}));
}

TEST(Graph, ExampleCouplingIsNonsingularWithDeterminantTwo) {
  const auto m = build_matrices(example_topology());
  EXPECT_TRUE(h_is_nonsingular(m));
  EXPECT_EQ(matrix_rank(m.coupling), 4);
  EXPECT_DOUBLE_EQ(cofactor_det(m.coupling), 2.0);
  EXPECT_DOUBLE_EQ(determinant(m.coupling), 2.0);
  EXPECT_TRUE(has_leader_spanning_tree(example_topology()));
}

TEST(Graph, EdgelessLeaderlessIsZero) {
  const auto g = Digraph::from_edges(3, {}, {});
  const auto m = build_matrices(g);
  EXPECT_TRUE(m.laplacian.isZero(0.0));
  EXPECT_TRUE(m.coupling.isZero(0.0));
  EXPECT_FALSE(h_is_nonsingular(m));
  EXPECT_FALSE(has_leader_spanning_tree(g));
}

TEST(Graph, RejectsInvalidWeights) {
  EXPECT_THROW(Digraph::from_edges(2, {{0, 1, -1.0}}, {}), GraphError);
  EXPECT_THROW(Digraph::from_edges(2, {{1, 1, 1.0}}, {}), GraphError);
  EXPECT_THROW(Digraph::from_edges(2, {{0, 2, 1.0}}, {}), GraphError);
}

TEST(Graph, SpanningTreeSmallCases) {
  EXPECT_TRUE(has_spanning_tree(Digraph::from_edges(1, {}, {}), 0));
  EXPECT_FALSE(has_spanning_tree(Digraph::from_edges(2, {}, {}), 0));
  // 1 receives from 0: information flows 0 -> 1.
  const auto chain = Digraph::from_edges(2, {{1, 0, 1.0}}, {});
  EXPECT_TRUE(has_spanning_tree(chain, 0));
  EXPECT_FALSE(has_spanning_tree(chain, 1));
  EXPECT_THROW(has_spanning_tree(chain, 2), GraphError);
}

TEST(Graph, RandomDigraphRowsOfLaplacianSumToZero) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> weight(0.0, 3.0);
  std::bernoulli_distribution present(0.4);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 6;
    std::vector<Edge> edges;
    std::vector<int> leaders;
    for (int i = 0; i < n; ++i) {
      if (present(rng)) leaders.push_back(i);
      for (int j = 0; j < n; ++j) {
        if (i != j && present(rng)) edges.push_back({i, j, weight(rng)});
      }
    }
    const auto m = build_matrices(Digraph::from_edges(n, edges, leaders));
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += m.laplacian(i, j);
      EXPECT_NEAR(row, 0.0, 1e-12);
      EXPECT_GE(m.degree(i, i), 0.0);
      EXPECT_TRUE(m.incidence(i, i) == 0.0 || m.incidence(i, i) == 1.0);
    }
  }
}

TEST(Graph, RandomLeaderRootedTreesGiveNonsingularCoupling) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Edge> edges;
    std::vector<int> leaders{order[0]};
    for (int k = 1; k < n; ++k) {
      const auto parent = rng() % static_cast<unsigned>(k + 1);
      if (parent == static_cast<unsigned>(k)) {
        leaders.push_back(order[static_cast<std::size_t>(k)]);
      } else {
        edges.push_back({order[static_cast<std::size_t>(k)], order[parent], 1.0});
      }
    }
    // Extra edges never break reachability.
    for (int e = 0; e < n; ++e) {
      const int i = static_cast<int>(rng() % static_cast<unsigned>(n));
      const int j = static_cast<int>(rng() % static_cast<unsigned>(n));
      if (i != j) edges.push_back({i, j, 0.5});
    }
    const auto g = Digraph::from_edges(n, edges, leaders);
    ASSERT_TRUE(has_leader_spanning_tree(g));
    const auto m = build_matrices(g);
    EXPECT_TRUE(h_is_nonsingular(m));
    EXPECT_GT(std::abs(cofactor_det(m.coupling)), 1e-9);
    EXPECT_NEAR(determinant(m.coupling), cofactor_det(m.coupling), 1e-9);
  }
}

TEST(Graph, NoLeaderMeansSingular) {
  const auto g = Digraph::from_edges(3, {{1, 0, 1.0}, {2, 1, 1.0}, {0, 2, 1.0}}, {});
  EXPECT_FALSE(has_leader_spanning_tree(g));
  EXPECT_FALSE(h_is_nonsingular(build_matrices(g)));
}

TEST(Graph, BuildIsFast) {
  const auto g = example_topology();
  const auto start = std::chrono::steady_clock::now();
  const auto m = build_matrices(g);
  const bool ok = h_is_nonsingular(m);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_TRUE(ok);
  EXPECT_LT(std::chrono::duration<double>(elapsed).count(), 1e-3);
}
