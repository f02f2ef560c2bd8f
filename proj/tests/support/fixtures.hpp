#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "imlg/design.hpp"
#include "imlg/numeric.hpp"
#include "imlg/rng.hpp"

namespace imlg::test {

inline Instance inst(std::string name, InstanceType t, double x, double y) {
  return Instance{std::move(name), t, x, y};
}

/// Pins written as "inst.pin".
inline Net net(std::string name, std::initializer_list<std::string> pins) {
  Net n{std::move(name), {}};
  for (const auto& p : pins) {
    const auto dot = p.find('.');
    n.pins.push_back({p.substr(0, dot), p.substr(dot + 1)});
  }
  return n;
}

inline PlacementDesign design(int w, int h, std::vector<Instance> instances, std::vector<Net> nets = {}) {
  PlacementDesign d;
  d.layout_w = w;
  d.layout_h = h;
  d.instances = std::move(instances);
  d.nets = std::move(nets);
  return d;
}

/// Erdos-Renyi graph with edge probability p; sorted, symmetric lists.
inline NeighborLists random_graph(std::size_t n, double p, Rng& rng) {
  NeighborLists adj(n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
  return adj;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace imlg::test
