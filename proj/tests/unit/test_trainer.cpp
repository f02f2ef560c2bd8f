#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "imlg/errors.hpp"
#include "imlg/trainer.hpp"

using namespace imlg;

namespace {

/// Two 6-node rings; node features carry a noisy copy of the label.
CircuitGraph tiny_graph(std::uint64_t seed) {
  Rng rng(seed);
  CircuitGraph g;
  const std::vector<int> y{1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0};
  for (std::uint32_t r = 0; r < 2; ++r)
    for (std::uint32_t k = 0; k < 6; ++k) {
      const std::uint32_t a = 6 * r + k, b = 6 * r + (k + 1) % 6;
      g.edges.push_back({std::min(a, b), std::max(a, b), EdgeRule::Congeneric});
    }
  for (std::size_t i = 0; i < 12; ++i) g.names.push_back("n" + std::to_string(i));
  g.rebuild_adjacency();
  g.features = test::random_matrix(12, 6, rng, 0.3);
  for (std::size_t i = 0; i < 12; ++i) g.features(static_cast<Eigen::Index>(i), 0) += y[i];
  g.labels = y;
  return g;
}

HyperParams small_hp() {
  HyperParams hp;
  hp.hidden_dim = 8;
  return hp;
}

TrainConfig tiny_cfg(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.cluster_size = 6;
  cfg.seed = seed;
  return cfg;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(Train, BitIdenticalLogs) {
  const CircuitGraph g = tiny_graph(1);
  const TrainResult a = train(g, small_hp(), tiny_cfg(3));
  const TrainResult b = train(g, small_hp(), tiny_cfg(3));
  EXPECT_EQ(a.partition.k, 2);
  EXPECT_EQ(a.log.entries.size(), 10u);
  EXPECT_EQ(a.log.to_csv(), b.log.to_csv());
  EXPECT_TRUE(a.model.params == b.model.params);
  EXPECT_EQ(a.log.entries, b.log.entries);
  EXPECT_NE(a.log.to_csv(), train(g, small_hp(), tiny_cfg(4)).log.to_csv());
}

TEST(Train, ObjectiveDecreases) {
  std::vector<double> first, last;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto obj = train(tiny_graph(seed), small_hp(), tiny_cfg(seed)).log.epoch_objectives();
    ASSERT_EQ(obj.size(), 5u);
    first.push_back(obj.front());
    last.push_back(obj.back());
  }
  EXPECT_LT(median(last), median(first));
}

TEST(Train, BaselineLeavesDecoderAlone) {
  TrainConfig cfg = tiny_cfg(2);
  cfg.baseline_mode = true;
  const TrainResult r = train(tiny_graph(2), small_hp(), cfg);
  for (const auto& e : r.log.entries) EXPECT_EQ(e.l_rec, 0.0);
  EXPECT_EQ(r.model.S(), Matrix::Identity(8, 8));
  EXPECT_EQ(r.smote_skipped, 0u);
}

TEST(Train, LogFormat) {
  const TrainResult r = train(tiny_graph(1), small_hp(), tiny_cfg(1));
  const std::string csv = r.log.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "epoch,cluster,l_clf,l_rec,objective");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
  for (const auto& e : r.log.entries) {
    EXPECT_TRUE(std::isfinite(e.objective));
    EXPECT_DOUBLE_EQ(e.objective, e.l_clf + e.l_rec);
  }
}

TEST(Train, EveryClusterOncePerEpoch) {
  const TrainResult r = train(tiny_graph(1), small_hp(), tiny_cfg(7));
  for (int epoch = 1; epoch <= 5; ++epoch) {
    std::vector<int> seen;
    for (const auto& e : r.log.entries)
      if (e.epoch == epoch) seen.push_back(e.cluster);
    std::sort(seen.begin(), seen.end());
    EXPECT_EQ(seen, (std::vector<int>{0, 1}));
  }
}

TEST(Train, Errors) {
  CircuitGraph g = tiny_graph(1);
  g.labels.assign(12, 0);
  EXPECT_THROW(train(g, small_hp(), tiny_cfg(1)), TrainError);
  g.labels.clear();
  EXPECT_THROW(train(g, small_hp(), tiny_cfg(1)), TrainError);
  TrainConfig bad = tiny_cfg(1);
  bad.epochs = 0;
  EXPECT_THROW(train(tiny_graph(1), small_hp(), bad), std::invalid_argument);
}

TEST(Train, ValidationEarlyStopping) {
  TrainConfig cfg = tiny_cfg(1);
  cfg.cluster_size = 4;
  cfg.epochs = 40;
  cfg.validation_clusters = 1;
  cfg.patience = 2;
  const TrainResult r = train(tiny_graph(1), small_hp(), cfg);
  EXPECT_LE(r.epochs_run, 40);
  for (const auto& e : r.log.entries) EXPECT_LE(e.epoch, r.epochs_run);
}

TEST(Infer, ScoresInUnitInterval) {
  const CircuitGraph g = tiny_graph(1);
  const Model m = train(g, small_hp(), tiny_cfg(1)).model;
  const Predictions a = infer(g, m);
  ASSERT_EQ(a.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GE(a.minority_prob[i], 0.0);
    EXPECT_LE(a.minority_prob[i], 1.0);
    EXPECT_EQ(a.labels[i], a.minority_prob[i] > 0.5 ? 1 : 0);
  }
  EXPECT_EQ(a.to_csv(), infer(g, m).to_csv());
  CircuitGraph wide = g;
  wide.features = Matrix::Zero(12, 7);
  EXPECT_THROW(infer(wide, m), std::invalid_argument);
}

TEST(Infer, CheckpointReloadIsExact) {
  const CircuitGraph g = tiny_graph(5);
  const Model m = train(g, small_hp(), tiny_cfg(5)).model;
  const std::string text = save_checkpoint(m);
  const Model back = load_checkpoint(text);
  EXPECT_EQ(infer(g, back).to_csv(), infer(g, m).to_csv());
  EXPECT_THROW(load_checkpoint(text.substr(0, text.size() - 40)), FormatError);
}
