#include "imlg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "imlg/packing.hpp"
#include "text_util.hpp"

namespace imlg {

std::string_view to_string(EdgeRule r) {
  switch (r) {
    case EdgeRule::Congeneric: return "congeneric";
    case EdgeRule::Correlation: return "correlation";
    case EdgeRule::Residual: return "residual";
  }
  return "?";
}

std::optional<EdgeRule> parse_edge_rule(std::string_view s) {
  if (s == "congeneric") return EdgeRule::Congeneric;
  if (s == "correlation") return EdgeRule::Correlation;
  if (s == "residual") return EdgeRule::Residual;
  return std::nullopt;
}

std::optional<EdgeRule> CircuitGraph::rule(std::uint32_t a, std::uint32_t b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{a, b},
                             [](const Edge& e, const std::pair<std::uint32_t, std::uint32_t>& k) {
                               return std::pair{e.u, e.v} < k;
                             });
  if (it == edges.end() || it->u != a || it->v != b) return std::nullopt;
  return it->rule;
}

std::vector<std::uint32_t> CircuitGraph::isolated() const {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < adj.size(); ++i)
    if (adj[i].empty()) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

std::unordered_map<std::string, std::uint32_t> CircuitGraph::name_index() const {
  std::unordered_map<std::string, std::uint32_t> idx;
  idx.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) idx.emplace(names[i], static_cast<std::uint32_t>(i));
  return idx;
}

void CircuitGraph::check_invariants() const {
  const std::size_t n = names.size();
  if (adj.size() != n) throw std::logic_error("adjacency size differs from node count");
  if (static_cast<std::size_t>(features.rows()) != n)
    throw std::logic_error("feature rows differ from node count");
  if (!labels.empty() && labels.size() != n) throw std::logic_error("label count differs from node count");
  for (int l : labels)
    if (l != 0 && l != 1) throw std::logic_error("label outside {0,1}");
  std::size_t half_degree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nb = adj[i];
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] >= n) throw std::logic_error(fmt::format("node {} has out-of-range neighbor", i));
      if (nb[k] == i) throw std::logic_error(fmt::format("self-loop at node {}", i));
      if (k && nb[k - 1] >= nb[k])
        throw std::logic_error(fmt::format("neighbor list of node {} not strictly sorted", i));
      const auto& back = adj[nb[k]];
      if (!std::binary_search(back.begin(), back.end(), static_cast<std::uint32_t>(i)))
        throw std::logic_error(fmt::format("asymmetric adjacency between {} and {}", i, nb[k]));
    }
    half_degree += nb.size();
  }
  if (half_degree != 2 * edges.size()) throw std::logic_error("edge list disagrees with adjacency");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].u >= edges[k].v) throw std::logic_error("edge not normalized (u < v)");
    if (k && std::pair{edges[k - 1].u, edges[k - 1].v} >= std::pair{edges[k].u, edges[k].v})
      throw std::logic_error("edge list not strictly sorted");
  }
}

void CircuitGraph::rebuild_adjacency() {
  for (auto& e : edges)
    if (e.u > e.v) std::swap(e.u, e.v);
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v, a.rule) < std::tie(b.u, b.v, b.rule);
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; }),
              edges.end());
  adj.assign(names.size(), {});
  for (const auto& e : edges) {
    if (e.u == e.v) throw std::logic_error("self-loop edge");
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
}

void BuildConfig::validate() const {
  if (!(L >= 1.0)) throw std::invalid_argument(fmt::format("L must be >= 1, got {}", L));
  if (edge_cap < 1) throw std::invalid_argument(fmt::format("edge_cap must be >= 1, got {}", edge_cap));
  if (encoder.region_depth < 1)
    throw std::invalid_argument(fmt::format("region_depth must be >= 1, got {}", encoder.region_depth));
}

namespace {

void normalize(EdgeList& e) {
  for (auto& [a, b] : e)
    if (a > b) std::swap(a, b);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
}

double dist2(const Instance& a, const Instance& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Nearest-first ordering with name tie-break.
struct NearestFirst {
  const PlacementDesign& design;
  std::size_t from;

  bool operator()(std::uint32_t a, std::uint32_t b) const {
    const auto& o = design.instances[from];
    const double da = dist2(o, design.instances[a]);
    const double db = dist2(o, design.instances[b]);
    if (da != db) return da < db;
    return design.instances[a].name < design.instances[b].name;
  }
};

struct Membership {
  std::vector<std::vector<std::uint32_t>> node_nets;
  std::vector<std::vector<std::uint32_t>> net_nodes;

  explicit Membership(const PlacementDesign& d) {
    const auto index = d.instance_index();
    node_nets.resize(d.instances.size());
    net_nodes.resize(d.nets.size());
    for (std::size_t ni = 0; ni < d.nets.size(); ++ni) {
      auto& members = net_nodes[ni];
      for (const auto& p : d.nets[ni].pins) members.push_back(static_cast<std::uint32_t>(index.at(p.instance)));
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      for (auto m : members) node_nets[m].push_back(static_cast<std::uint32_t>(ni));
    }
  }
};

}  // namespace

std::vector<std::vector<std::uint32_t>> congeneric_candidates(const PlacementDesign& design,
                                                              const BuildConfig& cfg) {
  cfg.validate();
  const std::size_t n = design.instances.size();
  const PackingNets nets = PackingNets::from(design);

  // Uniform buckets of side L: every node within Chebyshev distance L lies in
  // the 3x3 bucket block around the query's bucket.
  const int bw = static_cast<int>(std::floor(design.layout_w / cfg.L)) + 1;
  const int bh = static_cast<int>(std::floor(design.layout_h / cfg.L)) + 1;
  std::vector<std::vector<std::uint32_t>> buckets(static_cast<std::size_t>(bw) * bh);
  auto bucket_of = [&](const Instance& in) {
    return std::pair{std::min(bw - 1, static_cast<int>(std::floor(in.x / cfg.L))),
                     std::min(bh - 1, static_cast<int>(std::floor(in.y / cfg.L)))};
  };
  for (std::size_t i = 0; i < n; ++i) {
    auto [bx, by] = bucket_of(design.instances[i]);
    buckets[static_cast<std::size_t>(by) * bw + bx].push_back(static_cast<std::uint32_t>(i));
  }

  std::vector<std::vector<std::uint32_t>> out(n);
  std::vector<std::uint32_t> cand;
  for (std::size_t i = 0; i < n; ++i) {
    const Instance& me = design.instances[i];
    const bool lut = is_lut(me.type);
    auto [bx, by] = bucket_of(me);
    cand.clear();
    for (int y = std::max(0, by - 1); y <= std::min(bh - 1, by + 1); ++y) {
      for (int x = std::max(0, bx - 1); x <= std::min(bw - 1, bx + 1); ++x) {
        for (std::uint32_t j : buckets[static_cast<std::size_t>(y) * bw + x]) {
          if (j == i) continue;
          const Instance& o = design.instances[j];
          if (is_lut(o.type) != lut) continue;
          if (std::max(std::abs(o.x - me.x), std::abs(o.y - me.y)) > cfg.L) continue;
          if (lut ? !luts_compatible(nets, i, j) : !ffs_compatible(nets, i, j)) continue;
          cand.push_back(j);
        }
      }
    }
    const auto keep = std::min(cand.size(), static_cast<std::size_t>(cfg.edge_cap));
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end(),
                      NearestFirst{design, i});
    out[i].assign(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  return out;
}

EdgeList build_congeneric_edges(const PlacementDesign& design, const BuildConfig& cfg) {
  const auto sel = congeneric_candidates(design, cfg);
  EdgeList e;
  for (std::size_t i = 0; i < sel.size(); ++i)
    for (auto j : sel[i]) e.emplace_back(static_cast<std::uint32_t>(i), j);
  normalize(e);
  return e;
}

EdgeList build_correlation_edges(const PlacementDesign& design) {
  const auto index = design.instance_index();
  EdgeList e;
  for (const auto& net : design.nets) {
    std::optional<std::uint32_t> driver;
    for (const auto& p : net.pins) {
      const auto i = index.at(p.instance);
      if (is_lut(design.instances[i].type) && p.pin == "o") driver = static_cast<std::uint32_t>(i);
    }
    if (!driver) continue;
    for (const auto& p : net.pins) {
      const auto i = index.at(p.instance);
      if (!is_lut(design.instances[i].type) && p.pin == "d")
        e.emplace_back(*driver, static_cast<std::uint32_t>(i));
    }
  }
  normalize(e);
  return e;
}

ResidualResult build_residual_edges(const PlacementDesign& design, const EdgeList& partial,
                                    const BuildConfig& cfg) {
  cfg.validate();
  const std::size_t n = design.instances.size();
  std::vector<char> connected(n, 0);
  for (const auto& [a, b] : partial) connected[a] = connected[b] = 1;

  const Membership mem(design);
  ResidualResult res;
  std::vector<std::uint32_t> mark(n, UINT32_MAX);
  std::vector<std::uint32_t> nbrs;
  for (std::size_t i = 0; i < n; ++i) {
    if (connected[i]) continue;
    nbrs.clear();
    mark[i] = static_cast<std::uint32_t>(i);
    for (auto ni : mem.node_nets[i])
      for (auto j : mem.net_nodes[ni])
        if (mark[j] != i) {
          mark[j] = static_cast<std::uint32_t>(i);
          nbrs.push_back(j);
        }
    if (nbrs.empty()) {
      res.still_isolated.push_back(static_cast<std::uint32_t>(i));
      continue;
    }
    const auto keep = std::min(nbrs.size(), static_cast<std::size_t>(cfg.edge_cap));
    std::partial_sort(nbrs.begin(), nbrs.begin() + static_cast<std::ptrdiff_t>(keep), nbrs.end(),
                      NearestFirst{design, i});
    for (std::size_t k = 0; k < keep; ++k) res.edges.emplace_back(static_cast<std::uint32_t>(i), nbrs[k]);
  }
  normalize(res.edges);
  return res;
}

CircuitGraph build_graph(const PlacementDesign& design, const LabelSet* labels,
                         const BuildConfig& cfg) {
  cfg.validate();
  CircuitGraph g;
  g.names.reserve(design.instances.size());
  for (const auto& in : design.instances) g.names.push_back(in.name);

  if (labels) {
    g.labels.reserve(design.instances.size());
    for (const auto& in : design.instances) {
      auto it = labels->labels.find(in.name);
      if (it == labels->labels.end()) throw DesignError(fmt::format("missing instance {}", in.name));
      g.labels.push_back(it->second);
    }
    if (labels->labels.size() != design.instances.size())
      throw DesignError("label set covers instances not in the design");
  }

  const EdgeList cong = build_congeneric_edges(design, cfg);
  const EdgeList corr = build_correlation_edges(design);
  EdgeList partial = cong;
  partial.insert(partial.end(), corr.begin(), corr.end());
  normalize(partial);
  const ResidualResult resid = build_residual_edges(design, partial, cfg);

  for (const auto& [a, b] : cong) g.edges.push_back({a, b, EdgeRule::Congeneric});
  for (const auto& [a, b] : corr) g.edges.push_back({a, b, EdgeRule::Correlation});
  for (const auto& [a, b] : resid.edges) g.edges.push_back({a, b, EdgeRule::Residual});
  g.rebuild_adjacency();
  g.features = build_feature_matrix(design, cfg.encoder);
  g.check_invariants();
  return g;
}

std::uint64_t clique_expansion_edge_count(const PlacementDesign& design) {
  const Membership mem(design);
  const std::size_t n = design.instances.size();
  std::vector<std::uint32_t> mark(n, UINT32_MAX);
  std::uint64_t twice = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mark[i] = static_cast<std::uint32_t>(i);
    for (auto ni : mem.node_nets[i])
      for (auto j : mem.net_nodes[ni])
        if (mark[j] != i) {
          mark[j] = static_cast<std::uint32_t>(i);
          ++twice;
        }
  }
  return twice / 2;
}

CircuitGraph merge_graphs(const std::vector<const CircuitGraph*>& graphs, bool prefix_names) {
  CircuitGraph out;
  if (graphs.empty()) return out;
  const auto d = graphs.front()->features.cols();
  std::size_t total = 0;
  bool labelled = true;
  for (const auto* g : graphs) {
    if (g->features.cols() != d) throw std::invalid_argument("merge_graphs: feature dimensions differ");
    total += g->size();
    labelled = labelled && g->has_labels();
  }
  out.features.resize(static_cast<Eigen::Index>(total), d);
  std::uint32_t offset = 0;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const auto& g = *graphs[k];
    for (const auto& nm : g.names) out.names.push_back(prefix_names ? fmt::format("{}/{}", k, nm) : nm);
    for (const auto& e : g.edges) out.edges.push_back({e.u + offset, e.v + offset, e.rule});
    out.features.middleRows(offset, static_cast<Eigen::Index>(g.size())) = g.features;
    if (labelled) out.labels.insert(out.labels.end(), g.labels.begin(), g.labels.end());
    offset += static_cast<std::uint32_t>(g.size());
  }
  out.rebuild_adjacency();
  return out;
}

CircuitGraph induced_subgraph(const CircuitGraph& g, const std::vector<std::uint32_t>& nodes) {
  std::vector<std::int64_t> remap(g.size(), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) remap[nodes[k]] = static_cast<std::int64_t>(k);
  CircuitGraph out;
  out.names.reserve(nodes.size());
  out.features.resize(static_cast<Eigen::Index>(nodes.size()), g.features.cols());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    out.names.push_back(g.names[nodes[k]]);
    out.features.row(static_cast<Eigen::Index>(k)) = g.features.row(nodes[k]);
    if (g.has_labels()) out.labels.push_back(g.labels[nodes[k]]);
  }
  for (const auto& e : g.edges) {
    const auto a = remap[e.u];
    const auto b = remap[e.v];
    if (a >= 0 && b >= 0) out.edges.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), e.rule});
  }
  out.rebuild_adjacency();
  return out;
}

std::string write_graph(const CircuitGraph& g, const std::vector<int>& clusters) {
  fmt::memory_buffer out;
  auto it = std::back_inserter(out);
  fmt::format_to(it, "IMLG-GRAPH v1\nN {} D {}\n", g.size(), g.features.cols());
  for (std::size_t i = 0; i < g.size(); ++i) fmt::format_to(it, "NODE {} {}\n", i, g.names[i]);
  for (const auto& e : g.edges) fmt::format_to(it, "EDGE {} {} {}\n", e.u, e.v, to_string(e.rule));
  for (Eigen::Index i = 0; i < g.features.rows(); ++i) {
    fmt::format_to(it, "FEAT {}", i);
    for (Eigen::Index c = 0; c < g.features.cols(); ++c) fmt::format_to(it, " {}", g.features(i, c));
    out.push_back('\n');
  }
  for (std::size_t i = 0; i < g.labels.size(); ++i) fmt::format_to(it, "LABEL {} {}\n", i, g.labels[i]);
  for (std::size_t i = 0; i < clusters.size(); ++i) fmt::format_to(it, "CLUSTER {} {}\n", i, clusters[i]);
  return fmt::to_string(out);
}

GraphFile parse_graph(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::tokenize(lines[0]) != std::vector<std::string_view>{"IMLG-GRAPH", "v1"})
    throw FormatError("graph version mismatch: expected 'IMLG-GRAPH v1'", 1);
  GraphFile gf;
  CircuitGraph& g = gf.graph;
  std::size_t n = 0;
  Eigen::Index d = 0;
  bool have_header = false;
  std::vector<char> seen_feat, seen_label, seen_cluster;

  auto node_id = [&](std::string_view tok, std::size_t line) {
    const long long v = detail::parse_integer<FormatError>(tok, line);
    if (v < 0 || static_cast<std::size_t>(v) >= n)
      throw FormatError(fmt::format("node id {} out of range [0,{})", tok, n), line);
    return static_cast<std::uint32_t>(v);
  };

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t lineno = li + 1;
    const auto tok = detail::tokenize(detail::strip_comment(lines[li]));
    if (tok.empty()) continue;
    const auto kw = tok[0];
    if (kw == "N") {
      if (have_header) throw FormatError("duplicate N line", lineno);
      if (tok.size() != 4 || tok[2] != "D") throw FormatError("expected 'N <n> D <d>'", lineno);
      const long long nn = detail::parse_integer<FormatError>(tok[1], lineno);
      const long long dd = detail::parse_integer<FormatError>(tok[3], lineno);
      if (nn < 0 || dd < 0) throw FormatError("negative graph size", lineno);
      n = static_cast<std::size_t>(nn);
      d = static_cast<Eigen::Index>(dd);
      g.names.resize(n);
      for (std::size_t i = 0; i < n; ++i) g.names[i] = fmt::format("n{}", i);
      g.features = Matrix::Zero(static_cast<Eigen::Index>(n), d);
      seen_feat.assign(n, 0);
      seen_label.assign(n, 0);
      seen_cluster.assign(n, 0);
      have_header = true;
      continue;
    }
    if (!have_header) throw FormatError("record before 'N <n> D <d>' line", lineno);
    if (kw == "NODE") {
      if (tok.size() != 3) throw FormatError("NODE expects <id> <name>", lineno);
      g.names[node_id(tok[1], lineno)] = std::string(tok[2]);
    } else if (kw == "EDGE") {
      if (tok.size() != 4) throw FormatError("EDGE expects <i> <j> <rule>", lineno);
      const auto a = node_id(tok[1], lineno);
      const auto b = node_id(tok[2], lineno);
      if (a >= b) throw FormatError("EDGE requires i < j", lineno);
      const auto r = parse_edge_rule(tok[3]);
      if (!r) throw FormatError(fmt::format("unknown edge rule {}", tok[3]), lineno);
      g.edges.push_back({a, b, *r});
    } else if (kw == "FEAT") {
      if (tok.size() != static_cast<std::size_t>(d) + 2)
        throw FormatError(fmt::format("FEAT expects {} values", d), lineno);
      const auto i = node_id(tok[1], lineno);
      for (Eigen::Index c = 0; c < d; ++c)
        g.features(i, c) = detail::parse_double<FormatError>(tok[static_cast<std::size_t>(c) + 2], lineno);
      seen_feat[i] = 1;
    } else if (kw == "LABEL") {
      if (tok.size() != 3 || (tok[2] != "0" && tok[2] != "1"))
        throw FormatError("LABEL expects <i> <0|1>", lineno);
      const auto i = node_id(tok[1], lineno);
      if (g.labels.empty()) g.labels.assign(n, -1);
      g.labels[i] = tok[2] == "1" ? 1 : 0;
      seen_label[i] = 1;
    } else if (kw == "CLUSTER") {
      if (tok.size() != 3) throw FormatError("CLUSTER expects <node_id> <cluster_id>", lineno);
      const auto i = node_id(tok[1], lineno);
      if (gf.clusters.empty()) gf.clusters.assign(n, -1);
      gf.clusters[i] = detail::parse_int<FormatError>(tok[2], lineno);
      if (gf.clusters[i] < 0) throw FormatError("negative cluster id", lineno);
      seen_cluster[i] = 1;
    } else {
      throw FormatError(fmt::format("unknown graph record {}", kw), lineno);
    }
  }
  if (!have_header) throw FormatError("missing 'N <n> D <d>' line");
  if (d > 0 && std::find(seen_feat.begin(), seen_feat.end(), 0) != seen_feat.end())
    throw FormatError("missing FEAT line for some node");
  if (!g.labels.empty() && std::find(seen_label.begin(), seen_label.end(), 0) != seen_label.end())
    throw FormatError("LABEL lines must cover every node");
  if (!gf.clusters.empty() && std::find(seen_cluster.begin(), seen_cluster.end(), 0) != seen_cluster.end())
    throw FormatError("CLUSTER lines must cover every node");
  const std::size_t before = g.edges.size();
  g.rebuild_adjacency();
  if (g.edges.size() != before) throw FormatError("duplicate EDGE records");
  g.check_invariants();
  return gf;
}

}  // namespace imlg
