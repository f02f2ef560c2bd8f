#pragma once

// Rule-based packing oracle that produces ground-truth packed / unpacked
// labels from a placement snapshot.
//
// Architecture model: every integer slice cell is one CLB with 8 BLEs; a BLE
// holds at most 2 LUTs and 2 FFs. Two LUTs may share a BLE only if their
// combined distinct input nets number <= 6; two FFs only if their ck and sr
// nets are equal.

#include <array>
#include <vector>

#include "imlg/design.hpp"

namespace imlg {

inline constexpr int kBlesPerCell = 8;
inline constexpr int kLutsPerBle = 2;
inline constexpr int kFfsPerBle = 2;
inline constexpr int kMaxSharedLutInputs = 6;

/// Per-instance connectivity facts the packing rules need.
struct PackingNets {
  std::vector<std::vector<int>> lut_inputs;  ///< sorted distinct input net ids (LUTs)
  std::vector<int> ck;                       ///< ck net id or -1 (FFs)
  std::vector<int> sr;                       ///< sr net id or -1 (FFs)
  std::vector<int> d_driver;                 ///< LUT driving the FF's d pin, or -1

  static PackingNets from(const PlacementDesign& design);
};

bool luts_compatible(const PackingNets& nets, std::size_t a, std::size_t b);
bool ffs_compatible(const PackingNets& nets, std::size_t a, std::size_t b);

struct Ble {
  std::vector<std::size_t> luts;
  std::vector<std::size_t> ffs;
};

struct PackingResult {
  int cells_w = 0;
  int cells_h = 0;
  std::vector<std::array<Ble, kBlesPerCell>> cells;  ///< row-major, cell = y * cells_w + x
  std::vector<int> cell_of;                          ///< home cell per instance
  std::vector<int> packed_cell;                      ///< cell where packed, -1 if unpacked
  std::vector<int> packed_ble;                       ///< BLE index within cell, -1 if unpacked

  bool unpacked(std::size_t i) const { return packed_cell[i] < 0; }
  std::size_t unpacked_count() const;
};

/// Home cell (floor of the coordinates) of an instance.
int home_cell(const PlacementDesign& design, const Instance& inst);

/// Greedy two-phase first-fit packing. Instances are visited in
/// (home cell, type, name) order. Phase 1 tries only the home cell; phase 2
/// retries the leftovers on the 8 surrounding cells. Whatever is still
/// unplaced is unpacked.
PackingResult pack_design(const PlacementDesign& design);

/// Labels: 1 for instances pack_design could not place, 0 otherwise.
LabelSet packing_oracle(const PlacementDesign& design);

/// Whether `ble` could take instance `i` under the sharing rules.
bool ble_accepts(const Ble& ble, const PlacementDesign& design, const PackingNets& nets,
                 std::size_t i);

}  // namespace imlg
