#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "imlg/graph.hpp"
#include "imlg/model.hpp"
#include "imlg/partition.hpp"

namespace imlg {

class TrainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  int epochs = 1000;
  double lr = 1e-3;
  double weight_decay = 5e-4;
  std::size_t cluster_size = 10000;
  int clusters_per_batch = 1;
  std::uint64_t seed = 0;
  bool baseline_mode = false;
  /// Clusters withheld from training and scored after every epoch (0 = off).
  int validation_clusters = 0;
  /// Stop after this many epochs without validation improvement (0 = off).
  int patience = 0;

  void validate() const;
};

struct TrainLogEntry {
  int epoch;    ///< 1-based
  int cluster;  ///< first cluster of the batch
  double l_clf;
  double l_rec;
  double objective;

  bool operator==(const TrainLogEntry&) const = default;
};

struct TrainLog {
  std::vector<TrainLogEntry> entries;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;

  /// `epoch,cluster,l_clf,l_rec,objective` header and rows (17 significant
  /// digits). Wall-clock time is not part of the document.
  std::string to_csv() const;
  /// Mean objective of each epoch, in order.
  std::vector<double> epoch_objectives() const;
};

struct TrainResult {
  Model model;
  TrainLog log;
  Partition partition;
  std::size_t smote_skipped = 0;  ///< batches with fewer than two minority nodes
  int epochs_run = 0;
};

/// Seed streams derived from TrainConfig::seed.
enum SeedStream : std::uint64_t { kInitStream = 1, kPartitionStream = 2, kOrderStream = 3, kSmoteStream = 4 };

/// `partition` skips the partitioning step when given.
TrainResult train(const CircuitGraph& graph, const HyperParams& hp, const TrainConfig& cfg,
                  const std::optional<Partition>& partition = std::nullopt);

struct Predictions {
  std::vector<std::string> names;
  std::vector<double> minority_prob;
  std::vector<int> labels;

  std::size_t size() const { return names.size(); }
  /// `name,prob,label` lines.
  std::string to_csv() const;
};

/// Throws std::invalid_argument on a feature-dimension mismatch.
Predictions infer(const CircuitGraph& graph, const Model& model);

}  // namespace imlg
