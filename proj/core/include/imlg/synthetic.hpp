#pragma once

// Seeded synthetic placement snapshots: a uniform background plus Gaussian
// hotspots whose overflow produces unpacked elements under the packing oracle.

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "imlg/design.hpp"

namespace imlg {

class GenConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct GenConfig {
  int n_instances = 2000;
  double lut_ff_mix = 0.55;  ///< fraction of instances that are LUTs
  int layout_w = 0;          ///< 0: derived from n and mean_cell_occupancy
  int layout_h = 0;
  double mean_cell_occupancy = 8.0;
  int hotspot_count = 0;  ///< 0: one hotspot per 1000 instances (at least 1)
  double hotspot_intensity = 0.3;  ///< fraction of instances drawn from hotspots, in [0,1]
  double hotspot_sigma = 1.5;      ///< hotspot spread, slice units
  double target_minority = 0.10;   ///< used by generate_targeted
  double ff_driven_fraction = 0.7; ///< FFs whose d pin is driven by a nearby LUT
  int clock_nets = 2;
  int reset_nets = 2;
  std::uint64_t seed = 0;

  /// Throws GenConfigError when an invariant is violated or the instances
  /// cannot possibly fit (more than 32 elements per slice on average).
  void validate() const;
  int resolved_width() const;
  int resolved_height() const;
  int resolved_hotspots() const;
};

struct GeneratedDesign {
  PlacementDesign design;
  /// (LUT name, FF name) for every FF whose d pin is on the LUT's output net.
  std::vector<std::pair<std::string, std::string>> lut_ff_drivers;
};

/// Deterministic in the config (including seed); instances come out in
/// canonical (name) order.
GeneratedDesign generate_design(const GenConfig& cfg);

struct TargetedDesign {
  GeneratedDesign generated;
  LabelSet labels;
  double hotspot_intensity = 0.0;
  int oracle_evaluations = 0;
};

/// Bisects hotspot_intensity in [0, 1] (at most 12 oracle evaluations) so the
/// oracle's minority fraction approaches cfg.target_minority; returns the
/// closest design seen.
TargetedDesign generate_targeted(const GenConfig& cfg);

/// Variance of per-slice instance counts.
double cell_density_variance(const PlacementDesign& design);

}  // namespace imlg
