#pragma once

// Attributed node features: a 6-way instance-type one-hot followed by a
// hierarchical region code. At each of `region_depth` levels the current
// region is split 2x2 and the quadrant holding the point is one-hot encoded
// in (SW, SE, NW, NE) order; that quadrant becomes the next level's region.
// A coordinate lying exactly on a split line belongs to the lower-index side.

#include <array>

#include "imlg/design.hpp"
#include "imlg/numeric.hpp"

namespace imlg {

struct EncoderConfig {
  int region_depth = 4;

  int feature_dim() const { return kNumInstanceTypes + 4 * region_depth; }
};

std::array<double, kNumInstanceTypes> encode_type(InstanceType t);

/// 4*depth entries. Throws std::out_of_range when (x, y) is outside
/// [0, layout_w) x [0, layout_h) and std::invalid_argument for depth < 1.
std::vector<double> encode_region(double x, double y, int layout_w, int layout_h, int depth);

/// One row per design instance (design order).
Matrix build_feature_matrix(const PlacementDesign& design, const EncoderConfig& cfg);

}  // namespace imlg
