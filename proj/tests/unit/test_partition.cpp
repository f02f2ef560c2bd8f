#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "fixtures.hpp"
#include "imlg/graph.hpp"
#include "imlg/partition.hpp"
#include "imlg/synthetic.hpp"

using namespace imlg;

namespace {

NeighborLists path(std::size_t n) {
  NeighborLists adj(n);
  for (std::uint32_t i = 0; i + 1 < n; ++i) {
    adj[i].push_back(i + 1);
    adj[i + 1].push_back(i);
  }
  return adj;
}

/// Minimum cut over all 2-way assignments whose part sizes lie in [lo, hi].
std::pair<std::uint64_t, std::vector<int>> brute_force_bisection(const NeighborLists& adj, std::int64_t lo,
                                                                 std::int64_t hi) {
  const std::size_t n = adj.size();
  std::uint64_t best = ~0ull;
  std::vector<int> best_assign;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> a(n);
    std::int64_t ones = 0;
    for (std::size_t i = 0; i < n; ++i) ones += a[i] = (mask >> i) & 1;
    if (ones < lo || ones > hi || n - ones < static_cast<std::size_t>(lo) || static_cast<std::int64_t>(n) - ones > hi)
      continue;
    const auto c = cut_size(adj, a);
    if (c < best) {
      best = c;
      best_assign = a;
    }
  }
  return {best, best_assign};
}

std::vector<int> random_balanced(std::size_t n, int k, Rng& rng) {
  std::vector<int> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<int>(i % static_cast<std::size_t>(k));
  rng.shuffle(std::span<int>(a));
  return a;
}

void expect_valid(const Partition& p, std::size_t n, std::size_t target) {
  ASSERT_EQ(p.assignment.size(), n);
  const auto b = size_bounds(n, p.k, target);
  for (auto s : p.sizes()) {
    EXPECT_GE(static_cast<std::int64_t>(s), b.lo);
    EXPECT_LE(static_cast<std::int64_t>(s), b.hi);
    EXPECT_GT(s, 0u);
  }
  for (int a : p.assignment) {
    EXPECT_GE(a, 0);
    EXPECT_LT(a, p.k);
  }
}

}  // namespace

TEST(ClusterCount, RoundsToNearest) {
  EXPECT_EQ(cluster_count(10, 10), 1);
  EXPECT_EQ(cluster_count(5000, 1000), 5);
  EXPECT_EQ(cluster_count(5400, 1000), 5);
  EXPECT_EQ(cluster_count(5600, 1000), 6);
  EXPECT_EQ(cluster_count(3, 10), 1);
}

TEST(SizeBounds, HalfToOneAndHalfTarget) {
  const auto b = size_bounds(5000, 5, 1000);
  EXPECT_EQ(b.lo, 500);
  EXPECT_EQ(b.hi, 1500);
  const auto clamped = size_bounds(3, 1, 10);
  EXPECT_LE(clamped.lo, 3);
  EXPECT_GE(clamped.hi, 3);
}

TEST(PartitionGraph, PathOfFour) {
  const auto adj = path(4);
  const Partition p = partition_graph(adj, 2, 1);
  EXPECT_EQ(p.k, 2);
  EXPECT_EQ(p.cut, 1u);
  EXPECT_EQ(p.assignment[0], p.assignment[1]);
  EXPECT_EQ(p.assignment[2], p.assignment[3]);
  EXPECT_NE(p.assignment[0], p.assignment[2]);
  // {0,1}{2,3} -> 1, {0,2}{1,3} -> 3, {0,3}{1,2} -> 2
  EXPECT_EQ(brute_force_bisection(adj, 2, 2).first, 1u);
}

TEST(PartitionGraph, SingleCluster) {
  Rng rng(1);
  const auto adj = test::random_graph(10, 0.3, rng);
  const Partition p = partition_graph(adj, 10, 3);
  EXPECT_EQ(p.k, 1);
  EXPECT_EQ(p.cut, 0u);
  EXPECT_EQ(p.clusters().size(), 1u);
}

TEST(PartitionGraph, BeatsRandomBalancedOnCircuitGraphs) {
  int wins = 0, trials = 0;
  for (std::uint64_t design_seed = 0; design_seed < 5; ++design_seed) {
    GenConfig cfg;
    cfg.n_instances = 5000;
    cfg.seed = design_seed;
    const CircuitGraph g = build_graph(generate_design(cfg).design, nullptr, {});
    for (std::uint64_t s = 0; s < 20; ++s, ++trials) {
      const Partition p = partition_graph(g, 1000, s);
      ASSERT_EQ(p.k, 5);
      expect_valid(p, g.size(), 1000);
      for (auto sz : p.sizes()) {
        EXPECT_GE(sz, 500u);
        EXPECT_LE(sz, 1500u);
      }
      EXPECT_EQ(p.cut, cut_size(g.adj, p.assignment));
      Rng rng(1000 * design_seed + s);
      wins += p.cut <= cut_size(g.adj, random_balanced(g.size(), 5, rng));
    }
  }
  EXPECT_GE(wins, 95) << "of " << trials;
}

TEST(PartitionGraph, ValidOnRandomGraphs) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 50 + rng.below(400);
    const std::size_t target = 10 + rng.below(100);
    const auto adj = test::random_graph(n, 3.0 / static_cast<double>(n), rng);
    const Partition p = partition_graph(adj, target, static_cast<std::uint64_t>(trial));
    EXPECT_EQ(p.k, cluster_count(n, target));
    expect_valid(p, n, target);
    EXPECT_EQ(p.cut, cut_size(adj, p.assignment));
  }
}

TEST(PartitionGraph, Deterministic) {
  Rng rng(2);
  const auto adj = test::random_graph(600, 0.01, rng);
  const Partition a = partition_graph(adj, 100, 9);
  const Partition b = partition_graph(adj, 100, 9);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.cut, b.cut);
}

TEST(PartitionGraph, IsolatedNodesGoToSmallestClusters) {
  NeighborLists adj = path(40);
  adj.resize(48);
  const Partition p = partition_graph(adj, 12, 4);
  expect_valid(p, 48, 12);
  EXPECT_EQ(p.k, 4);
}

TEST(Coarsen, PerfectMatchingHalves) {
  for (std::size_t m : {1u, 5u, 64u}) {
    NeighborLists adj(2 * m);
    for (std::uint32_t i = 0; i < m; ++i) {
      adj[2 * i].push_back(2 * i + 1);
      adj[2 * i + 1].push_back(2 * i);
    }
    Rng rng(m);
    const CoarseLevel c = coarsen(WeightedGraph::from(adj), rng);
    EXPECT_EQ(c.graph.size(), m);
    EXPECT_EQ(c.graph.total_weight(), static_cast<std::int64_t>(2 * m));
    for (std::uint32_t i = 0; i < m; ++i) EXPECT_EQ(c.fine_to_coarse[2 * i], c.fine_to_coarse[2 * i + 1]);
  }
}

TEST(Coarsen, PreservesCutOfProjectedAssignments) {
  Rng rng(8);
  const auto adj = test::random_graph(200, 0.03, rng);
  const WeightedGraph g = WeightedGraph::from(adj);
  const CoarseLevel c = coarsen(g, rng);
  std::vector<int> coarse(c.graph.size());
  for (auto& a : coarse) a = static_cast<int>(rng.below(3));
  std::vector<int> fine(g.size());
  for (std::size_t i = 0; i < fine.size(); ++i) fine[i] = coarse[c.fine_to_coarse[i]];
  EXPECT_EQ(cut_weight(c.graph, coarse), cut_weight(g, fine));
  EXPECT_EQ(static_cast<std::uint64_t>(cut_weight(g, fine)), cut_size(adj, fine));
}

TEST(Refine, OptimalPartitionUnchanged) {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 6 + rng.below(7);
    const auto adj = test::random_graph(n, 0.35, rng);
    const SizeBounds b{static_cast<std::int64_t>(n / 2) - 1, static_cast<std::int64_t>(n - n / 2) + 1};
    const auto [best, assign] = brute_force_bisection(adj, b.lo, b.hi);
    const WeightedGraph g = WeightedGraph::from(adj);
    const auto out = refine(g, assign, 2, b);
    EXPECT_EQ(cut_size(adj, out), best) << "trial " << trial;
  }
}

TEST(Refine, NeverIncreasesCut) {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + rng.below(200);
    const int k = 2 + static_cast<int>(rng.below(4));
    const auto adj = test::random_graph(n, 4.0 / static_cast<double>(n), rng);
    const WeightedGraph g = WeightedGraph::from(adj);
    const auto in = random_balanced(n, k, rng);
    const std::size_t target = n / static_cast<std::size_t>(k);
    const auto b = size_bounds(n, k, target);
    const auto out = refine(g, in, k, b);
    EXPECT_LE(cut_size(adj, out), cut_size(adj, in)) << "trial " << trial;
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(k));
    for (int a : out) ++sizes[static_cast<std::size_t>(a)];
    for (auto s : sizes) {
      EXPECT_GE(s, b.lo);
      EXPECT_LE(s, b.hi);
    }
  }
}

TEST(InitialPartition, CoversAllNodes) {
  Rng rng(21);
  const auto adj = test::random_graph(300, 0.02, rng);
  const auto a = initial_partition(WeightedGraph::from(adj), 6, rng);
  ASSERT_EQ(a.size(), 300u);
  std::vector<int> seen(6);
  for (int c : a) {
    ASSERT_GE(c, 0);
    ASSERT_LT(c, 6);
    seen[static_cast<std::size_t>(c)] = 1;
  }
  EXPECT_EQ(std::accumulate(seen.begin(), seen.end(), 0), 6);
}
