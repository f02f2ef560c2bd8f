#pragma once

// Circuit graph construction with neighbor-priority connection:
//   congeneric  - same resource class (LUT-LUT / FF-FF) within Chebyshev
//                 distance L that could legally share a BLE; at most
//                 edge_cap nearest per node
//   correlation - a LUT whose `o` pin shares a net with an FF's `d` pin
//   residual    - nodes still isolated are tied to their nearest netlist
//                 neighbors (at most edge_cap)

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "imlg/design.hpp"
#include "imlg/features.hpp"
#include "imlg/numeric.hpp"

namespace imlg {

/// Ordered by precedence: when rules produce the same pair the lower tag wins.
enum class EdgeRule : std::uint8_t { Congeneric, Correlation, Residual };

std::string_view to_string(EdgeRule r);
std::optional<EdgeRule> parse_edge_rule(std::string_view s);

struct Edge {
  std::uint32_t u;  ///< u < v
  std::uint32_t v;
  EdgeRule rule;

  bool operator==(const Edge&) const = default;
};

struct CircuitGraph {
  std::vector<std::string> names;
  NeighborLists adj;        ///< strictly sorted, symmetric, no self-loops
  std::vector<Edge> edges;  ///< sorted by (u, v)
  Matrix features;          ///< n x d
  std::vector<int> labels;  ///< empty, or n entries in {0, 1}

  std::size_t size() const { return names.size(); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features.cols()); }
  bool has_labels() const { return !labels.empty(); }

  std::optional<EdgeRule> rule(std::uint32_t a, std::uint32_t b) const;
  std::vector<std::uint32_t> isolated() const;
  std::unordered_map<std::string, std::uint32_t> name_index() const;

  /// Throws std::logic_error on any broken structural invariant.
  void check_invariants() const;

  /// Builds `adj` from `edges` (sorting and deduplicating edges first).
  void rebuild_adjacency();
};

struct BuildConfig {
  double L = 5.0;
  int edge_cap = 16;
  EncoderConfig encoder;

  void validate() const;
};

using EdgeList = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

/// Per-node congeneric selection: compatible same-class nodes within
/// Chebyshev distance L, nearest first by Euclidean distance (ties by name),
/// truncated to edge_cap.
std::vector<std::vector<std::uint32_t>> congeneric_candidates(const PlacementDesign& design,
                                                              const BuildConfig& cfg);

/// Union of the per-node selections, normalized (u < v), sorted, unique.
EdgeList build_congeneric_edges(const PlacementDesign& design, const BuildConfig& cfg);

EdgeList build_correlation_edges(const PlacementDesign& design);

struct ResidualResult {
  EdgeList edges;
  std::vector<std::uint32_t> still_isolated;
};

/// `partial` holds the congeneric + correlation edges built so far.
ResidualResult build_residual_edges(const PlacementDesign& design, const EdgeList& partial,
                                    const BuildConfig& cfg);

/// Full build: edges, features and (optionally) labels in design order.
CircuitGraph build_graph(const PlacementDesign& design, const LabelSet* labels,
                         const BuildConfig& cfg);

/// Number of distinct node pairs that share at least one net (the edge count
/// of the plain clique expansion of every net).
std::uint64_t clique_expansion_edge_count(const PlacementDesign& design);

/// Disjoint union; node names are prefixed with `<graph index>/` when
/// `prefix_names` is set.
CircuitGraph merge_graphs(const std::vector<const CircuitGraph*>& graphs, bool prefix_names);

/// Induced subgraph on `nodes` (kept in the given order); edges leaving the
/// node set are dropped.
CircuitGraph induced_subgraph(const CircuitGraph& g, const std::vector<std::uint32_t>& nodes);

struct GraphFile {
  CircuitGraph graph;
  std::vector<int> clusters;  ///< empty when no CLUSTER lines are present
};

/// IMLG-GRAPH v1 text format; `clusters` are appended as CLUSTER lines when
/// non-empty.
std::string write_graph(const CircuitGraph& g, const std::vector<int>& clusters = {});
GraphFile parse_graph(std::string_view text);

}  // namespace imlg
