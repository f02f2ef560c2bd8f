#include "imlg/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace imlg {

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument(fmt::format("epochs must be >= 1, got {}", epochs));
  if (!(lr > 0.0)) throw std::invalid_argument(fmt::format("lr must be > 0, got {}", lr));
  if (!(weight_decay >= 0.0))
    throw std::invalid_argument(fmt::format("weight_decay must be >= 0, got {}", weight_decay));
  if (cluster_size < 1) throw std::invalid_argument("cluster_size must be >= 1");
  if (clusters_per_batch < 1)
    throw std::invalid_argument(fmt::format("clusters_per_batch must be >= 1, got {}", clusters_per_batch));
  if (validation_clusters < 0) throw std::invalid_argument("validation_clusters must be >= 0");
  if (patience < 0) throw std::invalid_argument("patience must be >= 0");
}

std::string TrainLog::to_csv() const {
  fmt::memory_buffer out;
  auto it = std::back_inserter(out);
  fmt::format_to(it, "epoch,cluster,l_clf,l_rec,objective\n");
  for (const auto& e : entries)
    fmt::format_to(it, "{},{},{:.17g},{:.17g},{:.17g}\n", e.epoch, e.cluster, e.l_clf, e.l_rec, e.objective);
  return fmt::to_string(out);
}

std::vector<double> TrainLog::epoch_objectives() const {
  std::vector<double> out;
  std::vector<std::size_t> count;
  for (const auto& e : entries) {
    const auto k = static_cast<std::size_t>(e.epoch - 1);
    if (out.size() <= k) {
      out.resize(k + 1, 0.0);
      count.resize(k + 1, 0);
    }
    out[k] += e.objective;
    ++count[k];
  }
  for (std::size_t k = 0; k < out.size(); ++k)
    if (count[k]) out[k] /= static_cast<double>(count[k]);
  return out;
}

namespace {

Batch to_batch(CircuitGraph&& g) {
  return Batch{std::move(g.adj), std::move(g.features), std::move(g.labels)};
}

double validation_nll(const Model& model, const Batch& b) {
  return loss_clf(infer_log_probs(model, b.adj, b.x), b.labels);
}

}  // namespace

TrainResult train(const CircuitGraph& graph, const HyperParams& hp, const TrainConfig& cfg,
                  const std::optional<Partition>& partition) {
  cfg.validate();
  hp.validate();
  if (graph.size() == 0) throw TrainError("cannot train on an empty graph");
  if (!graph.has_labels() || graph.labels.size() != graph.size())
    throw TrainError("training graph must carry a label for every node");
  const auto positives = std::count(graph.labels.begin(), graph.labels.end(), kMinorityClass);
  if (positives == 0 || static_cast<std::size_t>(positives) == graph.size())
    throw TrainError(fmt::format("training graph holds a single class ({} of {} nodes are minority)",
                                 positives, graph.size()));

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult res;
  res.partition = partition ? *partition
                            : partition_graph(graph, cfg.cluster_size, mix_seed(cfg.seed, kPartitionStream));
  if (res.partition.assignment.size() != graph.size())
    throw TrainError("partition does not cover the training graph");
  const auto clusters = res.partition.clusters();
  const int k = res.partition.k;

  std::vector<int> order_pool(static_cast<std::size_t>(k));
  std::iota(order_pool.begin(), order_pool.end(), 0);
  Rng order_rng(mix_seed(cfg.seed, kOrderStream));

  std::vector<int> train_ids, val_ids;
  if (cfg.validation_clusters > 0) {
    if (cfg.validation_clusters >= k)
      throw TrainError(fmt::format("validation_clusters={} leaves no training cluster out of {}",
                                   cfg.validation_clusters, k));
    order_rng.shuffle(std::span<int>(order_pool));
    val_ids.assign(order_pool.begin(), order_pool.begin() + cfg.validation_clusters);
    train_ids.assign(order_pool.begin() + cfg.validation_clusters, order_pool.end());
    std::sort(val_ids.begin(), val_ids.end());
    std::sort(train_ids.begin(), train_ids.end());
  } else {
    train_ids = order_pool;
  }

  std::vector<Batch> cluster_batches(static_cast<std::size_t>(k));
  if (cfg.clusters_per_batch == 1)
    for (int c : train_ids)
      cluster_batches[static_cast<std::size_t>(c)] = to_batch(induced_subgraph(graph, clusters[static_cast<std::size_t>(c)]));
  std::optional<Batch> val_batch;
  if (!val_ids.empty()) {
    std::vector<std::uint32_t> nodes;
    for (int c : val_ids) nodes.insert(nodes.end(), clusters[static_cast<std::size_t>(c)].begin(), clusters[static_cast<std::size_t>(c)].end());
    std::sort(nodes.begin(), nodes.end());
    val_batch = to_batch(induced_subgraph(graph, nodes));
  }

  res.model = init_model(static_cast<int>(graph.feature_dim()), hp, mix_seed(cfg.seed, kInitStream));
  Adam adam(res.model.params, AdamConfig{cfg.lr, cfg.weight_decay});
  std::vector<std::size_t> step_indices;
  for (std::size_t i = 0; i < res.model.params.size(); ++i)
    if (!(cfg.baseline_mode && res.model.params.params()[i].owner == Owner::Dec)) step_indices.push_back(i);

  Rng smote_rng(mix_seed(cfg.seed, kSmoteStream));
  StepOptions opt;
  opt.baseline = cfg.baseline_mode;
  res.log.seed = cfg.seed;

  double best_val = std::numeric_limits<double>::infinity();
  ParamStore best_params;
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<int> order = train_ids;
    order_rng.shuffle(std::span<int>(order));
    for (std::size_t pos = 0; pos < order.size(); pos += static_cast<std::size_t>(cfg.clusters_per_batch)) {
      const int first = order[pos];
      Batch assembled;
      const Batch* batch = nullptr;
      if (cfg.clusters_per_batch == 1) {
        batch = &cluster_batches[static_cast<std::size_t>(first)];
      } else {
        std::vector<std::uint32_t> nodes;
        const auto end = std::min(order.size(), pos + static_cast<std::size_t>(cfg.clusters_per_batch));
        for (std::size_t q = pos; q < end; ++q) {
          const auto& c = clusters[static_cast<std::size_t>(order[q])];
          nodes.insert(nodes.end(), c.begin(), c.end());
        }
        std::sort(nodes.begin(), nodes.end());
        assembled = to_batch(induced_subgraph(graph, nodes));
        batch = &assembled;
      }

      StepResult step;
      try {
        step = forward_backward(res.model, *batch, smote_rng, opt);
      } catch (const NumericError& e) {
        throw TrainError(fmt::format("non-finite loss at epoch {}, batch starting with cluster {}: {}", epoch,
                                     first, e.what()));
      }
      if (step.smote.skipped) ++res.smote_skipped;
      res.log.entries.push_back({epoch, first, step.l_clf, step.l_rec, step.objective});
      adam.step(res.model.params, step.grads, step_indices);
    }
    res.epochs_run = epoch;

    if (val_batch) {
      const double v = validation_nll(res.model, *val_batch);
      if (v < best_val) {
        best_val = v;
        best_params = res.model.params;
        since_best = 0;
      } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
        break;
      }
    }
  }
  if (val_batch && cfg.patience > 0 && best_params.size() > 0) res.model.params = best_params;

  res.log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::string Predictions::to_csv() const {
  fmt::memory_buffer out;
  auto it = std::back_inserter(out);
  for (std::size_t i = 0; i < names.size(); ++i)
    fmt::format_to(it, "{},{:.17g},{}\n", names[i], minority_prob[i], labels[i]);
  return fmt::to_string(out);
}

Predictions infer(const CircuitGraph& graph, const Model& model) {
  const Matrix logp = infer_log_probs(model, graph.adj, graph.features);
  Predictions p;
  p.names = graph.names;
  p.labels = predict_labels(logp);
  p.minority_prob.resize(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i)
    p.minority_prob[i] = std::exp(logp(static_cast<Eigen::Index>(i), kMinorityClass));
  return p;
}

}  // namespace imlg
