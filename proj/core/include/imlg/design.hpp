#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imlg/errors.hpp"

namespace imlg {

enum class InstanceType : std::uint8_t { LUT2, LUT3, LUT4, LUT5, LUT6, FF };

inline constexpr int kNumInstanceTypes = 6;

std::string_view to_string(InstanceType t);
std::optional<InstanceType> parse_instance_type(std::string_view s);

inline bool is_lut(InstanceType t) { return t != InstanceType::FF; }

/// Number of LUT inputs (0 for FF).
inline int lut_inputs(InstanceType t) {
  return is_lut(t) ? static_cast<int>(t) + 2 : 0;
}

/// Pin legality per type: LUTk has i0..i(k-1) and o; FF has d, q, ck, sr.
bool is_legal_pin(InstanceType t, std::string_view pin);

/// Output-class pins drive a net (LUT `o`, FF `q`).
bool is_output_pin(InstanceType t, std::string_view pin);

struct Instance {
  std::string name;
  InstanceType type = InstanceType::LUT2;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Instance&) const = default;
};

struct PinRef {
  std::string instance;
  std::string pin;

  bool operator==(const PinRef&) const = default;
};

struct Net {
  std::string name;
  std::vector<PinRef> pins;

  bool operator==(const Net&) const = default;
};

struct PlacementDesign {
  int layout_w = 1;
  int layout_h = 1;
  std::vector<Instance> instances;
  std::vector<Net> nets;

  bool operator==(const PlacementDesign&) const = default;

  /// name -> index into `instances`.
  std::map<std::string, std::size_t, std::less<>> instance_index() const;
};

/// Checks every PlacementDesign / Net / Instance invariant; throws DesignError.
void validate(const PlacementDesign& design);

PlacementDesign parse_design(std::string_view text);

/// Canonical serialization: instances and nets sorted by name, shortest
/// round-trip float formatting.
std::string write_design(const PlacementDesign& design);

/// Sorts instances and nets by name (the order write_design emits).
void canonicalize(PlacementDesign& design);

struct LabelSet {
  /// 0 = packed (majority), 1 = unpacked (minority / positive).
  std::map<std::string, int, std::less<>> labels;

  std::size_t minority_count() const;
  double minority_fraction() const;

  bool operator==(const LabelSet&) const = default;
};

/// Parses a label document and checks it covers exactly the design's instances.
LabelSet parse_labels(std::string_view text, const PlacementDesign& design);

/// Parses a label document without a design to check coverage against.
LabelSet parse_labels(std::string_view text);

std::string write_labels(const LabelSet& labels);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace imlg
