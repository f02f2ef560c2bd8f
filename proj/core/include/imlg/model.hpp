#pragma once

// Imbalance-aware graph model: neighbor-difference encoder, embedding-space
// minority oversampling, bilinear structure decoder and a one-layer SAGE
// classifier, trained on a weighted sum of classification and reconstruction
// losses.
//
// Parameter owners:
//   enc.W1  (3d x h)   Enc
//   dec.S   (h x h)    Dec
//   clf.W2  (3h x h)   Clf
//   clf.W3  (h x 2)    Clf

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imlg/numeric.hpp"
#include "imlg/params.hpp"
#include "imlg/rng.hpp"

namespace imlg {

inline constexpr int kMinorityClass = 1;

struct HyperParams {
  int hidden_dim = 64;
  double lambda = 1.0;
  double eta = 10.0;
  int smote_k = 5;
  double threshold = 0.5;
  bool oversample = true;
  bool soft_edges = false;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  HeaderFields to_header() const;
  /// Reads the fields written by to_header; absent keys keep their defaults.
  static HyperParams from_header(const HeaderFields& hp);
};

struct Model {
  HyperParams hp;
  int input_dim = 0;
  ParamStore params;

  const Matrix& W1() const { return params.value("enc.W1"); }
  const Matrix& S() const { return params.value("dec.S"); }
  const Matrix& W2() const { return params.value("clf.W2"); }
  const Matrix& W3() const { return params.value("clf.W3"); }
};

/// Glorot-uniform weights, S = I.
Model init_model(int input_dim, const HyperParams& hp, std::uint64_t seed);

std::string save_checkpoint(const Model& model);
/// Throws FormatError on a malformed document or inconsistent shapes.
Model load_checkpoint(std::string_view text);

// ---- encoder ---------------------------------------------------------------

struct EncoderTape {
  Matrix concat;  ///< n x 3d
  Matrix pre;     ///< n x h, before ReLU
  Matrix z;       ///< n x h
};

EncoderTape encode_forward(const NeighborLists& adj, const Matrix& x, const Matrix& W1);
inline Matrix encode(const NeighborLists& adj, const Matrix& x, const Matrix& W1) {
  return encode_forward(adj, x, W1).z;
}

// ---- oversampling ----------------------------------------------------------

struct SyntheticParent {
  std::uint32_t a;
  std::uint32_t b;
  double delta;
};

struct SmoteResult {
  Matrix z;                ///< (n + m) x h; first n rows are the input
  std::vector<int> labels;  ///< n + m
  std::vector<SyntheticParent> parents;
  bool skipped = false;  ///< fewer than two minority rows; nothing generated

  std::size_t synthetic_count() const { return parents.size(); }
};

/// Adds (majority - minority) synthetic minority rows. Anchors cycle through
/// the minority rows in index order; each picks one of its k nearest minority
/// neighbors uniformly and interpolates with delta ~ U[0, 1] (or `fixed_delta`).
SmoteResult smote_oversample(const Matrix& z, const std::vector<int>& labels, int k, Rng& rng,
                             std::optional<double> fixed_delta = std::nullopt);

// ---- decoder ---------------------------------------------------------------

/// sigmoid(z_i S z_j^T) for every (i, j).
Matrix pair_scores(const Matrix& zi, const Matrix& S, const Matrix& zj);

/// Augmented adjacency over n real + m synthetic nodes. The real-real block
/// is the input adjacency; `synthetic` holds the m x (n + m) weights of every
/// synthetic row (symmetric counterpart implied).
struct AugmentedAdjacency {
  const NeighborLists* real = nullptr;
  std::size_t n = 0;
  Matrix synthetic;

  std::size_t size() const { return n + static_cast<std::size_t>(synthetic.rows()); }
  std::size_t m() const { return static_cast<std::size_t>(synthetic.rows()); }
  /// Full (n + m)^2 matrix.
  Matrix dense() const;
};

/// Entries touching a synthetic node are max(s_ij, s_ji) > tau (or the soft
/// score when `soft`), with a zero diagonal.
AugmentedAdjacency decode_adjacency(const NeighborLists& real, std::size_t n, const Matrix& z_aug,
                                    const Matrix& S, double tau, bool soft);

/// Weighted mean over augmented neighbors (zero row when the weight sum is 0).
Matrix augmented_mean(const AugmentedAdjacency& a, const Matrix& h);
Matrix augmented_mean_backward(const AugmentedAdjacency& a, const Matrix& grad_out);

// ---- classifier ------------------------------------------------------------

struct ClassifierTape {
  Matrix concat;  ///< N x 3h
  Matrix pre;     ///< N x h
  Matrix hidden;  ///< N x h
  Matrix log_probs;  ///< N x 2
};

ClassifierTape classify_forward(const AugmentedAdjacency& a, const Matrix& h, const Matrix& W2,
                                const Matrix& W3);
/// Raw-graph form used at inference.
ClassifierTape classify_forward(const NeighborLists& adj, const Matrix& h, const Matrix& W2,
                                const Matrix& W3);

/// Class probabilities, rows summing to one.
Matrix class_probabilities(const Matrix& log_probs);
/// argmax per row, ties to class 0.
std::vector<int> predict_labels(const Matrix& log_probs);

// ---- losses ----------------------------------------------------------------

/// sum_{i != j} (eta_ij (A_ij - scores_ij))^2 with eta_ij = eta on edges, 1 elsewhere.
double loss_rec(const NeighborLists& adj, const Matrix& scores, double eta);

/// loss_rec on scores sigmoid(z_i S z_j^T), evaluated in row blocks. When
/// `dz` / `dS` are non-null the gradients are accumulated into them.
double loss_rec_blocked(const NeighborLists& adj, const Matrix& z, const Matrix& S, double eta,
                        Matrix* dz = nullptr, Matrix* dS = nullptr);

/// Mean negative log-likelihood.
double loss_clf(const Matrix& log_probs, const std::vector<int>& labels);

inline double total_objective(double l_clf, double l_rec, double lambda) {
  return l_clf + lambda * l_rec;
}

// ---- training step ---------------------------------------------------------

struct Batch {
  NeighborLists adj;
  Matrix x;
  std::vector<int> labels;
};

struct StepOptions {
  bool baseline = false;    ///< no oversampling, no decoder, L_rec = 0
  double clf_weight = 1.0;  ///< scales L_clf in the objective
  std::optional<double> fixed_delta;
};

struct StepResult {
  double l_clf = 0.0;
  double l_rec = 0.0;
  double objective = 0.0;
  std::vector<Matrix> grads;  ///< store-ordered
  SmoteResult smote;
  Matrix z;  ///< real embeddings
};

/// Forward pass and gradients of clf_weight * L_clf + lambda * L_rec.
StepResult forward_backward(const Model& model, const Batch& batch, Rng& rng,
                            const StepOptions& opt = {});

/// Objective only (used by finite-difference checks).
double objective_value(const Model& model, const Batch& batch, Rng& rng,
                       const StepOptions& opt = {});

/// Encoder + classifier on the raw graph; N x 2 log-probabilities.
Matrix infer_log_probs(const Model& model, const NeighborLists& adj, const Matrix& x);

}  // namespace imlg
