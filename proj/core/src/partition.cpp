#include "imlg/partition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace imlg {

std::vector<std::size_t> Partition::sizes() const {
  std::vector<std::size_t> s(static_cast<std::size_t>(k), 0);
  for (int a : assignment) ++s[static_cast<std::size_t>(a)];
  return s;
}

std::vector<std::vector<std::uint32_t>> Partition::clusters() const {
  std::vector<std::vector<std::uint32_t>> c(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < assignment.size(); ++i)
    c[static_cast<std::size_t>(assignment[i])].push_back(static_cast<std::uint32_t>(i));
  return c;
}

int cluster_count(std::size_t n, std::size_t target_size) {
  if (target_size == 0) target_size = 1;
  const auto k = static_cast<long long>(std::llround(static_cast<double>(n) / static_cast<double>(target_size)));
  return static_cast<int>(std::clamp<long long>(k, 1, std::max<long long>(1, static_cast<long long>(n))));
}

SizeBounds size_bounds(std::size_t n, int k, std::size_t target_size) {
  const auto t = static_cast<double>(target_size);
  const auto nn = static_cast<std::int64_t>(n);
  SizeBounds b;
  b.lo = static_cast<std::int64_t>(std::ceil(0.5 * t));
  b.hi = static_cast<std::int64_t>(std::floor(1.5 * t));
  b.lo = std::max<std::int64_t>(1, std::min(b.lo, nn / k));
  b.hi = std::max(b.hi, (nn + k - 1) / k);
  return b;
}

WeightedGraph WeightedGraph::from(const NeighborLists& adj) {
  WeightedGraph g;
  g.adj.resize(adj.size());
  g.node_weight.assign(adj.size(), 1);
  for (std::size_t i = 0; i < adj.size(); ++i)
    for (auto j : adj[i]) g.adj[i].push_back({j, 1});
  return g;
}

std::int64_t WeightedGraph::total_weight() const {
  return std::accumulate(node_weight.begin(), node_weight.end(), std::int64_t{0});
}

CoarseLevel coarsen(const WeightedGraph& g, Rng& rng, std::int64_t max_node_weight) {
  const std::size_t n = g.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(std::span<std::uint32_t>(order));

  constexpr std::uint32_t kUnmatched = UINT32_MAX;
  std::vector<std::uint32_t> match(n, kUnmatched);
  for (auto u : order) {
    if (match[u] != kUnmatched) continue;
    std::uint32_t best = kUnmatched;
    std::int64_t best_w = 0;
    for (const auto& a : g.adj[u]) {
      if (a.to == u || match[a.to] != kUnmatched) continue;
      if (g.node_weight[u] + g.node_weight[a.to] > max_node_weight) continue;
      const bool better =
          best == kUnmatched || a.weight > best_w ||
          (a.weight == best_w && (g.node_weight[a.to] < g.node_weight[best] ||
                                  (g.node_weight[a.to] == g.node_weight[best] && a.to < best)));
      if (better) {
        best = a.to;
        best_w = a.weight;
      }
    }
    match[u] = best == kUnmatched ? u : best;
    if (best != kUnmatched) match[best] = u;
  }

  CoarseLevel level;
  level.fine_to_coarse.assign(n, kUnmatched);
  std::uint32_t next = 0;
  for (std::uint32_t u = 0; u < n; ++u) {
    if (level.fine_to_coarse[u] != kUnmatched) continue;
    level.fine_to_coarse[u] = next;
    level.fine_to_coarse[match[u]] = next;
    ++next;
  }
  WeightedGraph& c = level.graph;
  c.adj.resize(next);
  c.node_weight.assign(next, 0);
  for (std::uint32_t u = 0; u < n; ++u) c.node_weight[level.fine_to_coarse[u]] += g.node_weight[u];

  // Sum parallel arcs with a dense scratch row per coarse node.
  std::vector<std::int64_t> acc(next, 0);
  std::vector<std::uint32_t> touched;
  std::vector<std::vector<std::uint32_t>> members(next);
  for (std::uint32_t u = 0; u < n; ++u) members[level.fine_to_coarse[u]].push_back(u);
  for (std::uint32_t cu = 0; cu < next; ++cu) {
    touched.clear();
    for (auto u : members[cu]) {
      for (const auto& a : g.adj[u]) {
        const auto cv = level.fine_to_coarse[a.to];
        if (cv == cu) continue;
        if (acc[cv] == 0) touched.push_back(cv);
        acc[cv] += a.weight;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (auto cv : touched) {
      c.adj[cu].push_back({cv, acc[cv]});
      acc[cv] = 0;
    }
  }
  return level;
}

namespace {

/// Multi-source BFS hop distance from `sources`; unreachable nodes get SIZE_MAX.
std::vector<std::size_t> bfs_distance(const WeightedGraph& g, const std::vector<std::uint32_t>& sources) {
  std::vector<std::size_t> dist(g.size(), SIZE_MAX);
  std::deque<std::uint32_t> q;
  for (auto s : sources) {
    dist[s] = 0;
    q.push_back(s);
  }
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    for (const auto& a : g.adj[u])
      if (dist[a.to] == SIZE_MAX) {
        dist[a.to] = dist[u] + 1;
        q.push_back(a.to);
      }
  }
  return dist;
}

std::uint32_t farthest(const std::vector<std::size_t>& dist) {
  std::uint32_t best = 0;
  for (std::uint32_t i = 1; i < dist.size(); ++i)
    if (dist[i] > dist[best]) best = i;
  return best;
}

}  // namespace

std::vector<int> initial_partition(const WeightedGraph& g, int k, Rng& rng) {
  const std::size_t n = g.size();
  std::vector<int> part(n, -1);
  if (n == 0) return part;
  if (k <= 1) {
    std::fill(part.begin(), part.end(), 0);
    return part;
  }

  std::vector<std::uint32_t> seeds;
  const auto start = static_cast<std::uint32_t>(rng.below(n));
  seeds.push_back(farthest(bfs_distance(g, {start})));
  while (seeds.size() < static_cast<std::size_t>(k) && seeds.size() < n) {
    auto dist = bfs_distance(g, seeds);
    for (auto s : seeds) dist[s] = 0;
    seeds.push_back(farthest(dist));
  }

  std::vector<std::int64_t> weight(static_cast<std::size_t>(k), 0);
  std::vector<std::deque<std::uint32_t>> frontier(static_cast<std::size_t>(k));
  auto claim = [&](std::uint32_t u, int p) {
    part[u] = p;
    weight[static_cast<std::size_t>(p)] += g.node_weight[u];
    for (const auto& a : g.adj[u])
      if (part[a.to] < 0) frontier[static_cast<std::size_t>(p)].push_back(a.to);
  };
  for (std::size_t p = 0; p < seeds.size(); ++p) claim(seeds[p], static_cast<int>(p));

  std::size_t assigned = seeds.size();
  std::uint32_t scan = 0;
  while (assigned < n) {
    // Lightest region with something to grow into.
    int pick = -1;
    for (int p = 0; p < k; ++p) {
      auto& f = frontier[static_cast<std::size_t>(p)];
      while (!f.empty() && part[f.front()] >= 0) f.pop_front();
      if (f.empty()) continue;
      if (pick < 0 || weight[static_cast<std::size_t>(p)] < weight[static_cast<std::size_t>(pick)]) pick = p;
    }
    if (pick < 0) {
      // Disconnected remainder: hand the next unassigned node to the lightest region.
      while (part[scan] >= 0) ++scan;
      const auto lightest = static_cast<int>(std::min_element(weight.begin(), weight.end()) - weight.begin());
      claim(scan, lightest);
    } else {
      auto& f = frontier[static_cast<std::size_t>(pick)];
      const auto u = f.front();
      f.pop_front();
      claim(u, pick);
    }
    ++assigned;
  }
  return part;
}

std::int64_t cut_weight(const WeightedGraph& g, const std::vector<int>& assignment) {
  std::int64_t cut = 0;
  for (std::size_t u = 0; u < g.size(); ++u)
    for (const auto& a : g.adj[u])
      if (u < a.to && assignment[u] != assignment[a.to]) cut += a.weight;
  return cut;
}

std::uint64_t cut_size(const NeighborLists& adj, const std::vector<int>& assignment) {
  std::uint64_t cut = 0;
  for (std::size_t u = 0; u < adj.size(); ++u)
    for (auto v : adj[u])
      if (u < v && assignment[u] != assignment[v]) ++cut;
  return cut;
}

namespace {

class Refiner {
public:
  Refiner(const WeightedGraph& g, std::vector<int>& part, int k, SizeBounds b)
      : g_(g), part_(part), k_(k), b_(b), weight_(static_cast<std::size_t>(k), 0),
        conn_(static_cast<std::size_t>(k), 0) {
    for (std::size_t u = 0; u < g.size(); ++u) weight_[static_cast<std::size_t>(part[u])] += g.node_weight[u];
  }

  /// Returns true if any move or swap was applied.
  bool pass() {
    bool changed = false;
    for (std::uint32_t u = 0; u < g_.size(); ++u) {
      if (!boundary(u)) continue;
      const int own = part_[u];
      connectivity(u);
      const std::int64_t internal = conn_[static_cast<std::size_t>(own)];
      int best = -1;
      std::int64_t best_gain = 0;
      int blocked = -1;
      std::int64_t blocked_gain = 0;
      for (int q = 0; q < k_; ++q) {
        if (q == own) continue;
        const std::int64_t gain = conn_[static_cast<std::size_t>(q)] - internal;
        if (gain <= 0) continue;
        if (movable(u, own, q)) {
          if (gain > best_gain) {
            best_gain = gain;
            best = q;
          }
        } else if (gain > blocked_gain) {
          blocked_gain = gain;
          blocked = q;
        }
      }
      if (best >= 0) {
        move(u, best);
        changed = true;
      } else if (blocked >= 0 && try_swap(u, blocked, blocked_gain)) {
        changed = true;
      }
    }
    return changed;
  }

private:
  bool boundary(std::uint32_t u) const {
    for (const auto& a : g_.adj[u])
      if (part_[a.to] != part_[u]) return true;
    return false;
  }

  void connectivity(std::uint32_t u) {
    std::fill(conn_.begin(), conn_.end(), 0);
    for (const auto& a : g_.adj[u]) conn_[static_cast<std::size_t>(part_[a.to])] += a.weight;
  }

  std::int64_t gain_to(std::uint32_t u, int q) const {
    std::int64_t gain = 0;
    for (const auto& a : g_.adj[u]) {
      if (part_[a.to] == q) gain += a.weight;
      else if (part_[a.to] == part_[u]) gain -= a.weight;
    }
    return gain;
  }

  bool movable(std::uint32_t u, int from, int to) const {
    const auto w = g_.node_weight[u];
    return weight_[static_cast<std::size_t>(from)] - w >= b_.lo &&
           weight_[static_cast<std::size_t>(to)] + w <= b_.hi;
  }

  void move(std::uint32_t u, int to) {
    weight_[static_cast<std::size_t>(part_[u])] -= g_.node_weight[u];
    weight_[static_cast<std::size_t>(to)] += g_.node_weight[u];
    part_[u] = to;
  }

  /// Swap u (in its part) with a neighbor-adjacent node v of part q when the
  /// combined gain is positive and both parts stay within bounds.
  bool try_swap(std::uint32_t u, int q, std::int64_t gain_u) {
    const int own = part_[u];
    std::uint32_t best = UINT32_MAX;
    std::int64_t best_total = 0;
    for (const auto& a : g_.adj[u]) {
      const auto v = a.to;
      if (part_[v] != q) continue;
      const std::int64_t w_uv = edge_weight(u, v);
      const std::int64_t total = gain_u + gain_to(v, own) - 2 * w_uv;
      if (total <= best_total) continue;
      const auto du = g_.node_weight[u];
      const auto dv = g_.node_weight[v];
      const auto wo = weight_[static_cast<std::size_t>(own)] - du + dv;
      const auto wq = weight_[static_cast<std::size_t>(q)] - dv + du;
      if (wo < b_.lo || wo > b_.hi || wq < b_.lo || wq > b_.hi) continue;
      best = v;
      best_total = total;
    }
    if (best == UINT32_MAX) return false;
    move(u, q);
    move(best, own);
    return true;
  }

  std::int64_t edge_weight(std::uint32_t u, std::uint32_t v) const {
    for (const auto& a : g_.adj[u])
      if (a.to == v) return a.weight;
    return 0;
  }

  const WeightedGraph& g_;
  std::vector<int>& part_;
  int k_;
  SizeBounds b_;
  std::vector<std::int64_t> weight_;
  std::vector<std::int64_t> conn_;
};

/// Forces every cluster into [lo, hi] with the cheapest single-node moves.
/// May increase the cut; only used to repair balance.
void rebalance(const WeightedGraph& g, std::vector<int>& part, int k, SizeBounds b) {
  std::vector<std::int64_t> weight(static_cast<std::size_t>(k), 0);
  for (std::size_t u = 0; u < g.size(); ++u) weight[static_cast<std::size_t>(part[u])] += g.node_weight[u];
  auto cost = [&](std::uint32_t u, int to) {
    std::int64_t c = 0;
    for (const auto& a : g.adj[u]) {
      if (part[a.to] == part[u]) c += a.weight;
      else if (part[a.to] == to) c -= a.weight;
    }
    return c;
  };
  for (std::size_t guard = 0; guard < 4 * g.size() + 16; ++guard) {
    int over = -1, under = -1;
    for (int p = 0; p < k; ++p) {
      if (weight[static_cast<std::size_t>(p)] > b.hi &&
          (over < 0 || weight[static_cast<std::size_t>(p)] > weight[static_cast<std::size_t>(over)]))
        over = p;
      if (weight[static_cast<std::size_t>(p)] < b.lo &&
          (under < 0 || weight[static_cast<std::size_t>(p)] < weight[static_cast<std::size_t>(under)]))
        under = p;
    }
    if (over < 0 && under < 0) return;
    int from = over, to = under;
    if (from < 0) from = static_cast<int>(std::max_element(weight.begin(), weight.end()) - weight.begin());
    if (to < 0) to = static_cast<int>(std::min_element(weight.begin(), weight.end()) - weight.begin());
    std::uint32_t best = UINT32_MAX;
    std::int64_t best_cost = 0;
    for (std::uint32_t u = 0; u < g.size(); ++u) {
      if (part[u] != from) continue;
      const auto c = cost(u, to);
      if (best == UINT32_MAX || c < best_cost) {
        best = u;
        best_cost = c;
      }
    }
    if (best == UINT32_MAX) return;
    weight[static_cast<std::size_t>(from)] -= g.node_weight[best];
    weight[static_cast<std::size_t>(to)] += g.node_weight[best];
    part[best] = to;
  }
}

}  // namespace

std::vector<int> refine(const WeightedGraph& g, std::vector<int> assignment, int k, SizeBounds bounds,
                        int max_passes) {
  Refiner r(g, assignment, k, bounds);
  for (int p = 0; p < max_passes; ++p)
    if (!r.pass()) break;
  return assignment;
}

Partition partition_graph(const CircuitGraph& g, std::size_t target_size, std::uint64_t seed) {
  return partition_graph(g.adj, target_size, seed);
}

Partition partition_graph(const NeighborLists& adj, std::size_t target_size, std::uint64_t seed) {
  const std::size_t n = adj.size();
  Partition out;
  out.k = cluster_count(n, target_size);
  out.assignment.assign(n, 0);
  if (n == 0 || out.k == 1) {
    out.cut = 0;
    return out;
  }
  const int k = out.k;
  const SizeBounds bounds = size_bounds(n, k, target_size);
  Rng rng(mix_seed(seed, 0x9a27));

  std::vector<std::uint32_t> core, isolated;
  for (std::uint32_t i = 0; i < n; ++i) (adj[i].empty() ? isolated : core).push_back(i);
  std::vector<std::int64_t> local(n, -1);
  for (std::size_t c = 0; c < core.size(); ++c) local[core[c]] = static_cast<std::int64_t>(c);

  NeighborLists core_adj(core.size());
  for (std::size_t c = 0; c < core.size(); ++c)
    for (auto j : adj[core[c]]) core_adj[c].push_back(static_cast<std::uint32_t>(local[j]));

  std::vector<int> core_part(core.size(), 0);
  if (core.size() >= static_cast<std::size_t>(k)) {
    const SizeBounds core_bounds = size_bounds(core.size(), k, target_size);
    std::vector<WeightedGraph> levels{WeightedGraph::from(core_adj)};
    std::vector<std::vector<std::uint32_t>> maps;
    const std::int64_t max_w = std::max<std::int64_t>(2, core_bounds.hi / 4);
    while (levels.back().size() > static_cast<std::size_t>(20 * k) && levels.size() < 40) {
      CoarseLevel next = coarsen(levels.back(), rng, max_w);
      if (next.graph.size() * 10 > levels.back().size() * 9) break;  // < 10% reduction
      maps.push_back(std::move(next.fine_to_coarse));
      levels.push_back(std::move(next.graph));
    }
    std::vector<int> part = initial_partition(levels.back(), k, rng);
    rebalance(levels.back(), part, k, core_bounds);
    part = refine(levels.back(), std::move(part), k, core_bounds);
    for (std::size_t lv = levels.size() - 1; lv-- > 0;) {
      std::vector<int> fine(levels[lv].size());
      for (std::size_t u = 0; u < fine.size(); ++u) fine[u] = part[maps[lv][u]];
      part = std::move(fine);
      rebalance(levels[lv], part, k, core_bounds);
      part = refine(levels[lv], std::move(part), k, core_bounds);
    }
    core_part = std::move(part);
  } else {
    for (std::size_t c = 0; c < core.size(); ++c) core_part[c] = static_cast<int>(c);
  }

  std::vector<std::size_t> size(static_cast<std::size_t>(k), 0);
  for (std::size_t c = 0; c < core.size(); ++c) {
    out.assignment[core[c]] = core_part[c];
    ++size[static_cast<std::size_t>(core_part[c])];
  }
  for (auto i : isolated) {
    const auto p = static_cast<std::size_t>(std::min_element(size.begin(), size.end()) - size.begin());
    out.assignment[i] = static_cast<int>(p);
    ++size[p];
  }

  const WeightedGraph full = WeightedGraph::from(adj);
  rebalance(full, out.assignment, k, bounds);
  out.assignment = refine(full, std::move(out.assignment), k, bounds);
  out.cut = cut_size(adj, out.assignment);
  return out;
}

}  // namespace imlg
