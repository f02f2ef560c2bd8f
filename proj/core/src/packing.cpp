#include "imlg/packing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace imlg {

PackingNets PackingNets::from(const PlacementDesign& design) {
  const std::size_t n = design.instances.size();
  PackingNets nets;
  nets.lut_inputs.assign(n, {});
  nets.ck.assign(n, -1);
  nets.sr.assign(n, -1);
  nets.d_driver.assign(n, -1);
  const auto index = design.instance_index();

  for (std::size_t ni = 0; ni < design.nets.size(); ++ni) {
    const Net& net = design.nets[ni];
    const int id = static_cast<int>(ni);
    int lut_driver = -1;
    for (const auto& p : net.pins) {
      const std::size_t i = index.at(p.instance);
      if (is_lut(design.instances[i].type) && p.pin == "o") lut_driver = static_cast<int>(i);
    }
    for (const auto& p : net.pins) {
      const std::size_t i = index.at(p.instance);
      if (is_lut(design.instances[i].type)) {
        if (p.pin != "o") nets.lut_inputs[i].push_back(id);
      } else if (p.pin == "ck") {
        nets.ck[i] = id;
      } else if (p.pin == "sr") {
        nets.sr[i] = id;
      } else if (p.pin == "d") {
        nets.d_driver[i] = lut_driver;
      }
    }
  }
  for (auto& v : nets.lut_inputs) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return nets;
}

bool luts_compatible(const PackingNets& nets, std::size_t a, std::size_t b) {
  const auto& x = nets.lut_inputs[a];
  const auto& y = nets.lut_inputs[b];
  std::size_t shared = 0;
  for (std::size_t i = 0, j = 0; i < x.size() && j < y.size();) {
    if (x[i] < y[j]) {
      ++i;
    } else if (y[j] < x[i]) {
      ++j;
    } else {
      ++shared;
      ++i;
      ++j;
    }
  }
  return x.size() + y.size() - shared <= static_cast<std::size_t>(kMaxSharedLutInputs);
}

bool ffs_compatible(const PackingNets& nets, std::size_t a, std::size_t b) {
  return nets.ck[a] == nets.ck[b] && nets.sr[a] == nets.sr[b];
}

bool ble_accepts(const Ble& ble, const PlacementDesign& design, const PackingNets& nets,
                 std::size_t i) {
  if (is_lut(design.instances[i].type)) {
    if (ble.luts.size() >= kLutsPerBle) return false;
    return std::all_of(ble.luts.begin(), ble.luts.end(),
                       [&](std::size_t o) { return luts_compatible(nets, o, i); });
  }
  if (ble.ffs.size() >= kFfsPerBle) return false;
  return std::all_of(ble.ffs.begin(), ble.ffs.end(),
                     [&](std::size_t o) { return ffs_compatible(nets, o, i); });
}

std::size_t PackingResult::unpacked_count() const {
  return static_cast<std::size_t>(
      std::count_if(packed_cell.begin(), packed_cell.end(), [](int c) { return c < 0; }));
}

int home_cell(const PlacementDesign& design, const Instance& inst) {
  const int cx = std::clamp(static_cast<int>(std::floor(inst.x)), 0, design.layout_w - 1);
  const int cy = std::clamp(static_cast<int>(std::floor(inst.y)), 0, design.layout_h - 1);
  return cy * design.layout_w + cx;
}

namespace {

class Packer {
public:
  explicit Packer(const PlacementDesign& design)
      : design_(design), nets_(PackingNets::from(design)) {
    const std::size_t n = design.instances.size();
    result_.cells_w = design.layout_w;
    result_.cells_h = design.layout_h;
    result_.cells.resize(static_cast<std::size_t>(design.layout_w) * design.layout_h);
    result_.cell_of.resize(n);
    result_.packed_cell.assign(n, -1);
    result_.packed_ble.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) result_.cell_of[i] = home_cell(design, design.instances[i]);
  }

  PackingResult run() {
    std::vector<std::size_t> order(design_.instances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& ia = design_.instances[a];
      const auto& ib = design_.instances[b];
      return std::tie(result_.cell_of[a], ia.type, ia.name) <
             std::tie(result_.cell_of[b], ib.type, ib.name);
    });

    std::vector<std::size_t> leftover;
    for (std::size_t i : order)
      if (!try_cell(i, result_.cell_of[i])) leftover.push_back(i);

    static constexpr int kRing[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                        {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
    for (std::size_t i : leftover) {
      const int home = result_.cell_of[i];
      const int hx = home % design_.layout_w;
      const int hy = home / design_.layout_w;
      for (const auto& d : kRing) {
        const int x = hx + d[0];
        const int y = hy + d[1];
        if (x < 0 || y < 0 || x >= design_.layout_w || y >= design_.layout_h) continue;
        if (try_cell(i, y * design_.layout_w + x)) break;
      }
    }
    return std::move(result_);
  }

private:
  bool try_cell(std::size_t i, int cell) {
    if (!is_lut(design_.instances[i].type)) {
      const int drv = nets_.d_driver[i];
      if (drv >= 0 && result_.packed_cell[static_cast<std::size_t>(drv)] == cell) {
        const int b = result_.packed_ble[static_cast<std::size_t>(drv)];
        if (place(i, cell, b)) return true;
      }
    }
    for (int b = 0; b < kBlesPerCell; ++b)
      if (place(i, cell, b)) return true;
    return false;
  }

  bool place(std::size_t i, int cell, int b) {
    Ble& ble = result_.cells[static_cast<std::size_t>(cell)][static_cast<std::size_t>(b)];
    if (!ble_accepts(ble, design_, nets_, i)) return false;
    (is_lut(design_.instances[i].type) ? ble.luts : ble.ffs).push_back(i);
    result_.packed_cell[i] = cell;
    result_.packed_ble[i] = b;
    return true;
  }

  const PlacementDesign& design_;
  PackingNets nets_;
  PackingResult result_;
};

}  // namespace

PackingResult pack_design(const PlacementDesign& design) { return Packer(design).run(); }

LabelSet packing_oracle(const PlacementDesign& design) {
  const PackingResult r = pack_design(design);
  LabelSet labels;
  for (std::size_t i = 0; i < design.instances.size(); ++i)
    labels.labels.emplace(design.instances[i].name, r.unpacked(i) ? 1 : 0);
  return labels;
}

}  // namespace imlg
