#pragma once

// Multilevel k-way partitioning for cluster mini-batching: heavy-edge
// matching coarsening, BFS region growing on the coarsest graph, then
// projection with boundary refinement at every level.

#include <cstdint>
#include <limits>
#include <vector>

#include "imlg/graph.hpp"
#include "imlg/rng.hpp"

namespace imlg {

struct Partition {
  std::vector<int> assignment;  ///< cluster id per node, in [0, k)
  int k = 0;
  std::uint64_t cut = 0;  ///< edges whose endpoints lie in different clusters

  std::vector<std::size_t> sizes() const;
  /// Node ids of each cluster, ascending.
  std::vector<std::vector<std::uint32_t>> clusters() const;
};

/// round(n / target_size), at least 1.
int cluster_count(std::size_t n, std::size_t target_size);

/// Admissible cluster sizes: [0.5, 1.5] x target, widened just enough to
/// contain n / k when k had to be clamped (the remainder cluster).
struct SizeBounds {
  std::int64_t lo = 1;
  std::int64_t hi = 1;
};
SizeBounds size_bounds(std::size_t n, int k, std::size_t target_size);

/// Node- and edge-weighted graph used across coarsening levels.
struct WeightedGraph {
  struct Arc {
    std::uint32_t to;
    std::int64_t weight;
  };
  std::vector<std::vector<Arc>> adj;
  std::vector<std::int64_t> node_weight;

  static WeightedGraph from(const NeighborLists& adj);
  std::size_t size() const { return adj.size(); }
  std::int64_t total_weight() const;
};

struct CoarseLevel {
  WeightedGraph graph;
  std::vector<std::uint32_t> fine_to_coarse;
};

/// One level of heavy-edge matching. Nodes are visited in a seeded random
/// order; a pair is merged only if its combined weight stays within
/// `max_node_weight`.
CoarseLevel coarsen(const WeightedGraph& g, Rng& rng,
                    std::int64_t max_node_weight = std::numeric_limits<std::int64_t>::max());

/// Grows k regions by BFS from mutually distant seeds; the lightest region
/// with a non-empty frontier grows next.
std::vector<int> initial_partition(const WeightedGraph& g, int k, Rng& rng);

/// Greedy boundary moves and pair swaps with strictly positive gain that keep
/// every cluster weight within `bounds`. Never increases the cut.
std::vector<int> refine(const WeightedGraph& g, std::vector<int> assignment, int k,
                        SizeBounds bounds, int max_passes = 8);

std::int64_t cut_weight(const WeightedGraph& g, const std::vector<int>& assignment);
std::uint64_t cut_size(const NeighborLists& adj, const std::vector<int>& assignment);

/// Full pipeline. Isolated nodes are kept out of the multilevel scheme and
/// dealt round-robin to the smallest clusters.
Partition partition_graph(const CircuitGraph& g, std::size_t target_size, std::uint64_t seed);
Partition partition_graph(const NeighborLists& adj, std::size_t target_size, std::uint64_t seed);

}  // namespace imlg
