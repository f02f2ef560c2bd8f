#include "imlg/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "imlg/errors.hpp"

namespace imlg {

namespace {

constexpr Eigen::Index kRecBlockRows = 128;

Matrix glorot(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-a, a);
  return m;
}

double parse_double_field(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw FormatError(fmt::format("HP {}: not a number: {}", key, v));
  return out;
}

int parse_int_field(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw FormatError(fmt::format("HP {}: not an integer: {}", key, v));
  return out;
}

bool parse_bool_field(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw FormatError(fmt::format("HP {}: expected true or false, got {}", key, v));
}

}  // namespace

void HyperParams::validate() const {
  if (hidden_dim < 1) throw std::invalid_argument(fmt::format("hidden_dim must be >= 1, got {}", hidden_dim));
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument(fmt::format("lambda must be >= 0, got {}", lambda));
  if (!(eta > 1.0) || !std::isfinite(eta))
    throw std::invalid_argument(fmt::format("eta must be > 1, got {}", eta));
  if (smote_k < 1) throw std::invalid_argument(fmt::format("smote_k must be >= 1, got {}", smote_k));
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument(fmt::format("threshold must lie in (0, 1), got {}", threshold));
}

HeaderFields HyperParams::to_header() const {
  return {
      {"hidden_dim", fmt::format("{}", hidden_dim)},
      {"lambda", fmt::format("{}", lambda)},
      {"eta", fmt::format("{}", eta)},
      {"smote_k", fmt::format("{}", smote_k)},
      {"threshold", fmt::format("{}", threshold)},
      {"oversample", oversample ? "true" : "false"},
      {"soft_edges", soft_edges ? "true" : "false"},
  };
}

HyperParams HyperParams::from_header(const HeaderFields& fields) {
  HyperParams hp;
  for (const auto& [k, v] : fields) {
    if (k == "hidden_dim") hp.hidden_dim = parse_int_field(k, v);
    else if (k == "lambda") hp.lambda = parse_double_field(k, v);
    else if (k == "eta") hp.eta = parse_double_field(k, v);
    else if (k == "smote_k") hp.smote_k = parse_int_field(k, v);
    else if (k == "threshold") hp.threshold = parse_double_field(k, v);
    else if (k == "oversample") hp.oversample = parse_bool_field(k, v);
    else if (k == "soft_edges") hp.soft_edges = parse_bool_field(k, v);
  }
  return hp;
}

Model init_model(int input_dim, const HyperParams& hp, std::uint64_t seed) {
  hp.validate();
  if (input_dim < 1) throw std::invalid_argument(fmt::format("input_dim must be >= 1, got {}", input_dim));
  Rng rng(seed);
  const Eigen::Index d = input_dim, h = hp.hidden_dim;
  Model m;
  m.hp = hp;
  m.input_dim = input_dim;
  m.params.add(Owner::Enc, "enc.W1", glorot(3 * d, h, rng));
  m.params.add(Owner::Dec, "dec.S", Matrix::Identity(h, h));
  m.params.add(Owner::Clf, "clf.W2", glorot(3 * h, h, rng));
  m.params.add(Owner::Clf, "clf.W3", glorot(h, 2, rng));
  return m;
}

std::string save_checkpoint(const Model& model) {
  HeaderFields hdr = model.hp.to_header();
  hdr.emplace_back("input_dim", fmt::format("{}", model.input_dim));
  return write_checkpoint(model.params, hdr);
}

Model load_checkpoint(std::string_view text) {
  Checkpoint ck = parse_checkpoint(text);
  Model m;
  m.hp = HyperParams::from_header(ck.hp);
  try {
    m.hp.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(fmt::format("checkpoint hyperparameters: {}", e.what()));
  }
  bool have_dim = false;
  for (const auto& [k, v] : ck.hp)
    if (k == "input_dim") {
      m.input_dim = parse_int_field(k, v);
      have_dim = true;
    }
  if (!have_dim) throw FormatError("checkpoint lacks HP input_dim");
  m.params = std::move(ck.params);

  const Eigen::Index d = m.input_dim, h = m.hp.hidden_dim;
  const struct {
    const char* name;
    Owner owner;
    Eigen::Index rows, cols;
  } expected[] = {{"enc.W1", Owner::Enc, 3 * d, h},
                  {"dec.S", Owner::Dec, h, h},
                  {"clf.W2", Owner::Clf, 3 * h, h},
                  {"clf.W3", Owner::Clf, h, 2}};
  if (m.params.size() != std::size(expected))
    throw FormatError(fmt::format("checkpoint holds {} parameters, expected {}", m.params.size(),
                                  std::size(expected)));
  for (std::size_t i = 0; i < std::size(expected); ++i) {
    const auto& p = m.params.params()[i];
    const auto& e = expected[i];
    if (p.name != e.name || p.owner != e.owner)
      throw FormatError(fmt::format("checkpoint parameter {} is {}, expected {}", i, p.name, e.name));
    if (p.value.rows() != e.rows || p.value.cols() != e.cols)
      throw FormatError(fmt::format("shape mismatch for {}: {}x{}, expected {}x{}", p.name,
                                    p.value.rows(), p.value.cols(), e.rows, e.cols));
  }
  return m;
}

EncoderTape encode_forward(const NeighborLists& adj, const Matrix& x, const Matrix& W1) {
  EncoderTape t;
  t.concat = concat_self_neighbor_diff(x, mean_aggregate(adj, x));
  check_matmul(t.concat, W1, "encoder");
  t.pre = t.concat * W1;
  t.z = relu(t.pre);
  return t;
}

SmoteResult smote_oversample(const Matrix& z, const std::vector<int>& labels, int k, Rng& rng,
                             std::optional<double> fixed_delta) {
  if (labels.size() != static_cast<std::size_t>(z.rows()))
    throw NumericError(fmt::format("smote: {} labels for {} rows", labels.size(), z.rows()));
  if (k < 1) throw std::invalid_argument("smote: k must be >= 1");
  SmoteResult out;
  out.labels = labels;

  std::vector<std::uint32_t> minority;
  for (std::uint32_t i = 0; i < labels.size(); ++i)
    if (labels[i] == kMinorityClass) minority.push_back(i);
  const std::size_t majority = labels.size() - minority.size();
  const std::size_t m = majority > minority.size() ? majority - minority.size() : 0;
  if (m == 0 || minority.size() < 2) {
    out.skipped = m > 0;
    out.z = z;
    return out;
  }

  const std::size_t c = minority.size();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), c - 1);
  // Anchors cycle through all minority rows, so every row needs its neighbors.
  std::vector<std::vector<std::uint32_t>> nearest(c);
  std::vector<std::pair<double, std::uint32_t>> cand;
  for (std::size_t i = 0; i < c; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < c; ++j) {
      if (j == i) continue;
      cand.emplace_back((z.row(minority[i]) - z.row(minority[j])).squaredNorm(), minority[j]);
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk), cand.end());
    for (std::size_t r = 0; r < kk; ++r) nearest[i].push_back(cand[r].second);
  }

  out.z.resize(z.rows() + static_cast<Eigen::Index>(m), z.cols());
  out.z.topRows(z.rows()) = z;
  out.parents.reserve(m);
  for (std::size_t s = 0; s < m; ++s) {
    const std::size_t ai = s % c;
    const std::uint32_t a = minority[ai];
    const std::uint32_t b = nearest[ai][rng.below(kk)];
    const double u = rng.uniform();
    const double delta = fixed_delta ? *fixed_delta : u;
    out.z.row(z.rows() + static_cast<Eigen::Index>(s)) = (1.0 - delta) * z.row(a) + delta * z.row(b);
    out.parents.push_back({a, b, delta});
    out.labels.push_back(kMinorityClass);
  }
  return out;
}

Matrix pair_scores(const Matrix& zi, const Matrix& S, const Matrix& zj) {
  check_matmul(zi, S, "pair_scores");
  return sigmoid(Matrix((zi * S) * zj.transpose()));
}

Matrix AugmentedAdjacency::dense() const {
  const auto N = static_cast<Eigen::Index>(size());
  Matrix a = Matrix::Zero(N, N);
  for (std::size_t i = 0; i < n; ++i)
    for (auto j : (*real)[i]) a(static_cast<Eigen::Index>(i), j) = 1.0;
  const auto nn = static_cast<Eigen::Index>(n);
  for (Eigen::Index s = 0; s < synthetic.rows(); ++s) {
    a.row(nn + s) = synthetic.row(s);
    a.col(nn + s) = synthetic.row(s).transpose();
  }
  return a;
}

AugmentedAdjacency decode_adjacency(const NeighborLists& real, std::size_t n, const Matrix& z_aug,
                                    const Matrix& S, double tau, bool soft) {
  if (real.size() != n || static_cast<std::size_t>(z_aug.rows()) < n)
    throw NumericError("decode_adjacency: inconsistent node counts");
  check_matmul(z_aug, S, "decoder");
  AugmentedAdjacency a;
  a.real = &real;
  a.n = n;
  const auto nn = static_cast<Eigen::Index>(n);
  const Eigen::Index m = z_aug.rows() - nn;
  if (m == 0) {
    a.synthetic.resize(0, nn);
    return a;
  }
  const auto zs = z_aug.bottomRows(m);
  const Matrix forward = (zs * S) * z_aug.transpose();               // s(i, j)
  const Matrix backward = (zs * S.transpose()) * z_aug.transpose();  // s(j, i)
  a.synthetic = forward.cwiseMax(backward);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < a.synthetic.cols(); ++j) {
      const double s = sigmoid(a.synthetic(i, j));
      a.synthetic(i, j) = soft ? s : (s > tau ? 1.0 : 0.0);
    }
    a.synthetic(i, nn + i) = 0.0;
  }
  return a;
}

namespace {

Vector augmented_degree(const AugmentedAdjacency& a) {
  const auto nn = static_cast<Eigen::Index>(a.n);
  Vector deg(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.n; ++i) deg(static_cast<Eigen::Index>(i)) = static_cast<double>((*a.real)[i].size());
  if (a.synthetic.rows() > 0) {
    deg.head(nn) += a.synthetic.leftCols(nn).colwise().sum().transpose();
    deg.tail(a.synthetic.rows()) = a.synthetic.rowwise().sum();
  }
  return deg;
}

}  // namespace

Matrix augmented_mean(const AugmentedAdjacency& a, const Matrix& h) {
  if (static_cast<std::size_t>(h.rows()) != a.size())
    throw NumericError(fmt::format("augmented_mean: {} rows for {} nodes", h.rows(), a.size()));
  const auto nn = static_cast<Eigen::Index>(a.n);
  const Eigen::Index m = a.synthetic.rows();
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (std::size_t i = 0; i < a.n; ++i) {
    auto row = out.row(static_cast<Eigen::Index>(i));
    for (auto j : (*a.real)[i]) row += h.row(j);
  }
  if (m > 0) {
    out.topRows(nn).noalias() += a.synthetic.leftCols(nn).transpose() * h.bottomRows(m);
    out.bottomRows(m).noalias() = a.synthetic * h;
  }
  const Vector deg = augmented_degree(a);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    if (deg(i) > 0.0) out.row(i) /= deg(i);
  return out;
}

Matrix augmented_mean_backward(const AugmentedAdjacency& a, const Matrix& grad_out) {
  const auto nn = static_cast<Eigen::Index>(a.n);
  const Eigen::Index m = a.synthetic.rows();
  const Vector deg = augmented_degree(a);
  Matrix g = grad_out;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    if (deg(i) > 0.0) g.row(i) /= deg(i);
    else g.row(i).setZero();
  }
  Matrix out = Matrix::Zero(grad_out.rows(), grad_out.cols());
  for (std::size_t i = 0; i < a.n; ++i)
    for (auto j : (*a.real)[i]) out.row(j) += g.row(static_cast<Eigen::Index>(i));
  if (m > 0) {
    out.bottomRows(m).noalias() += a.synthetic.leftCols(nn) * g.topRows(nn);
    out.noalias() += a.synthetic.transpose() * g.bottomRows(m);
  }
  return out;
}

namespace {

ClassifierTape classify_from_mean(const Matrix& h, const Matrix& neigh, const Matrix& W2,
                                  const Matrix& W3) {
  ClassifierTape t;
  t.concat = concat_self_neighbor_diff(h, neigh);
  check_matmul(t.concat, W2, "classifier");
  t.pre = t.concat * W2;
  t.hidden = relu(t.pre);
  check_matmul(t.hidden, W3, "classifier head");
  t.log_probs = log_softmax_rows(t.hidden * W3);
  return t;
}

}  // namespace

ClassifierTape classify_forward(const AugmentedAdjacency& a, const Matrix& h, const Matrix& W2,
                                const Matrix& W3) {
  return classify_from_mean(h, augmented_mean(a, h), W2, W3);
}

ClassifierTape classify_forward(const NeighborLists& adj, const Matrix& h, const Matrix& W2,
                                const Matrix& W3) {
  return classify_from_mean(h, mean_aggregate(adj, h), W2, W3);
}

Matrix class_probabilities(const Matrix& log_probs) { return log_probs.array().exp(); }

std::vector<int> predict_labels(const Matrix& log_probs) {
  std::vector<int> out(static_cast<std::size_t>(log_probs.rows()));
  for (Eigen::Index i = 0; i < log_probs.rows(); ++i) out[static_cast<std::size_t>(i)] = log_probs(i, 1) > log_probs(i, 0) ? 1 : 0;
  return out;
}

double loss_rec(const NeighborLists& adj, const Matrix& scores, double eta) {
  const auto n = static_cast<Eigen::Index>(adj.size());
  if (scores.rows() != n || scores.cols() != n)
    throw NumericError(fmt::format("loss_rec: {}x{} scores for {} nodes", scores.rows(), scores.cols(), n));
  Matrix a = Matrix::Zero(n, n);
  Matrix mask = Matrix::Ones(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (auto j : adj[static_cast<std::size_t>(i)]) {
      a(i, j) = 1.0;
      mask(i, j) = eta;
    }
    mask(i, i) = 0.0;
  }
  return masked_sq_frobenius(a - scores, mask);
}

double loss_rec_blocked(const NeighborLists& adj, const Matrix& z, const Matrix& S, double eta,
                        Matrix* dz, Matrix* dS) {
  const auto n = z.rows();
  if (adj.size() != static_cast<std::size_t>(n))
    throw NumericError("loss_rec: adjacency and embeddings disagree on node count");
  check_matmul(z, S, "loss_rec");
  const Matrix zS = z * S;
  const Matrix zSt = z * S.transpose();
  const double eta2 = eta * eta;
  double total = 0.0;
  Matrix g;
  for (Eigen::Index b0 = 0; b0 < n; b0 += kRecBlockRows) {
    const Eigen::Index bn = std::min(kRecBlockRows, n - b0);
    Matrix s = zS.middleRows(b0, bn) * z.transpose();
    g.setZero(bn, n);
    Matrix w = Matrix::Ones(bn, n);
    Matrix target = Matrix::Zero(bn, n);
    for (Eigen::Index r = 0; r < bn; ++r) {
      for (auto j : adj[static_cast<std::size_t>(b0 + r)]) {
        target(r, j) = 1.0;
        w(r, j) = eta2;
      }
      w(r, b0 + r) = 0.0;
    }
    double block = 0.0;
    for (Eigen::Index r = 0; r < bn; ++r) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double sv = sigmoid(s(r, j));
        const double diff = target(r, j) - sv;
        block += w(r, j) * diff * diff;
        g(r, j) = -2.0 * w(r, j) * diff * sv * (1.0 - sv);
      }
    }
    total += block;
    if (dz) {
      dz->middleRows(b0, bn).noalias() += g * zSt;
      dz->noalias() += g.transpose() * zS.middleRows(b0, bn);
    }
    if (dS) dS->noalias() += z.middleRows(b0, bn).transpose() * (g * z);
  }
  return total;
}

double loss_clf(const Matrix& log_probs, const std::vector<int>& labels) {
  if (labels.size() != static_cast<std::size_t>(log_probs.rows()))
    throw NumericError(fmt::format("loss_clf: {} labels for {} rows", labels.size(), log_probs.rows()));
  if (labels.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) sum -= log_probs(static_cast<Eigen::Index>(i), labels[i]);
  return sum / static_cast<double>(labels.size());
}

StepResult forward_backward(const Model& model, const Batch& batch, Rng& rng, const StepOptions& opt) {
  const HyperParams& hp = model.hp;
  const auto n = static_cast<std::size_t>(batch.x.rows());
  if (batch.adj.size() != n || batch.labels.size() != n)
    throw NumericError("batch: adjacency, features and labels disagree on node count");
  if (batch.x.cols() != model.input_dim)
    throw NumericError(fmt::format("batch has {} features, model expects {}", batch.x.cols(), model.input_dim));

  StepResult r;
  const EncoderTape enc = encode_forward(batch.adj, batch.x, model.W1());
  r.z = enc.z;

  const bool augment = !opt.baseline && hp.oversample;
  if (augment) {
    r.smote = smote_oversample(enc.z, batch.labels, hp.smote_k, rng, opt.fixed_delta);
  } else {
    r.smote.z = enc.z;
    r.smote.labels = batch.labels;
  }

  AugmentedAdjacency aug;
  if (opt.baseline) {
    aug.real = &batch.adj;
    aug.n = n;
    aug.synthetic.resize(0, static_cast<Eigen::Index>(n));
  } else {
    aug = decode_adjacency(batch.adj, n, r.smote.z, model.S(), hp.threshold, hp.soft_edges);
  }

  const ClassifierTape clf = classify_forward(aug, r.smote.z, model.W2(), model.W3());
  r.l_clf = loss_clf(clf.log_probs, r.smote.labels);

  Matrix dz = Matrix::Zero(enc.z.rows(), enc.z.cols());
  Matrix dS = Matrix::Zero(model.S().rows(), model.S().cols());
  if (!opt.baseline) r.l_rec = loss_rec_blocked(batch.adj, enc.z, model.S(), hp.eta, &dz, &dS);
  r.objective = opt.clf_weight * r.l_clf + hp.lambda * r.l_rec;
  if (!std::isfinite(r.objective)) throw NumericError("non-finite objective");

  // Classifier branch.
  const auto N = clf.log_probs.rows();
  Matrix d_logp = Matrix::Zero(N, 2);
  const double scale = opt.clf_weight / static_cast<double>(N);
  for (Eigen::Index i = 0; i < N; ++i) d_logp(i, r.smote.labels[static_cast<std::size_t>(i)]) = -scale;
  const Matrix d_logits = log_softmax_rows_backward(clf.log_probs, d_logp);
  Matrix dW3 = clf.hidden.transpose() * d_logits;
  const Matrix d_pre2 = relu_backward(clf.pre, d_logits * model.W3().transpose());
  Matrix dW2 = clf.concat.transpose() * d_pre2;
  Matrix d_self, d_neigh;
  concat_self_neighbor_diff_backward(d_pre2 * model.W2().transpose(), d_self, d_neigh);
  Matrix dz_aug = d_self + augmented_mean_backward(aug, d_neigh);

  // Reconstruction branch joins on the real rows.
  dz *= hp.lambda;
  dS *= hp.lambda;
  dz += dz_aug.topRows(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < r.smote.parents.size(); ++s) {
    const auto& p = r.smote.parents[s];
    const auto g = dz_aug.row(static_cast<Eigen::Index>(n + s));
    dz.row(p.a) += (1.0 - p.delta) * g;
    dz.row(p.b) += p.delta * g;
  }

  Matrix dW1 = enc.concat.transpose() * relu_backward(enc.pre, dz);

  r.grads = {std::move(dW1), std::move(dS), std::move(dW2), std::move(dW3)};
  for (std::size_t i = 0; i < r.grads.size(); ++i)
    check_finite(r.grads[i], fmt::format("gradient of {}", model.params.params()[i].name));
  return r;
}

double objective_value(const Model& model, const Batch& batch, Rng& rng, const StepOptions& opt) {
  return forward_backward(model, batch, rng, opt).objective;
}

Matrix infer_log_probs(const Model& model, const NeighborLists& adj, const Matrix& x) {
  if (x.cols() != model.input_dim)
    throw std::invalid_argument(fmt::format("feature dimension mismatch: graph has {}, checkpoint expects {}",
                                            x.cols(), model.input_dim));
  const Matrix z = encode(adj, x, model.W1());
  return classify_forward(adj, z, model.W2(), model.W3()).log_probs;
}

}  // namespace imlg
