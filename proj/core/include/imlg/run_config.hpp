#pragma once

// key=value run configuration shared by every CLI subcommand. Blank lines and
// `#` comments are ignored; unknown keys and ill-typed values are rejected.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "imlg/graph.hpp"
#include "imlg/model.hpp"
#include "imlg/trainer.hpp"

namespace imlg {

struct RunConfig {
  double lr = 1e-3;
  double weight_decay = 5e-4;
  int epochs = 1000;
  int hidden_dim = 64;
  double lambda = 1.0;
  double eta = 10.0;
  int smote_k = 5;
  double threshold = 0.5;
  int region_depth = 4;
  double L = 5.0;
  int edge_cap = 16;
  std::uint64_t cluster_size = 10000;
  int clusters_per_batch = 1;
  std::uint64_t seed = 0;
  bool baseline_mode = false;
  bool soft_edges = false;
  int validation_clusters = 0;
  int patience = 0;

  /// Throws FormatError naming the key (and line, when parsing a document).
  void set(std::string_view key, std::string_view value, std::size_t line = 0);
  static RunConfig parse(std::string_view text);

  static const std::vector<std::string>& keys();
  std::string get(std::string_view key) const;
  /// Every key in keys() order as `key=value` lines.
  std::string render() const;

  HyperParams hyper_params() const;
  TrainConfig train_config() const;
  BuildConfig build_config() const;

  /// Throws FormatError if a value is out of range for its consumer.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

}  // namespace imlg
