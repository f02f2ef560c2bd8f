#include "imlg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "imlg/errors.hpp"
#include "text_util.hpp"

namespace imlg {

std::size_t ScoredSet::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

std::vector<RocPoint> roc_curve(const ScoredSet& s) {
  if (s.scores.size() != s.labels.size())
    throw MetricsError(fmt::format("{} scores for {} labels", s.scores.size(), s.labels.size()));
  const std::size_t pos = s.positives();
  const std::size_t neg = s.size() - pos;
  if (pos == 0 || neg == 0) throw MetricsError("ROC needs both classes present");

  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.scores[a] > s.scores[b]; });

  std::vector<RocPoint> roc{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < idx.size();) {
    const double score = s.scores[idx[i]];
    for (; i < idx.size() && s.scores[idx[i]] == score; ++i) (s.labels[idx[i]] == 1 ? tp : fp)++;
    roc.push_back({static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos)});
  }
  return roc;
}

double auc(const std::vector<RocPoint>& roc) {
  double area = 0.0;
  for (std::size_t i = 1; i < roc.size(); ++i)
    area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2.0;
  return area;
}

double tpr_at_fpr(const std::vector<RocPoint>& roc, double fpr_target) {
  if (!(fpr_target >= 0.0 && fpr_target <= 1.0))
    throw MetricsError(fmt::format("FPR target {} outside [0, 1]", fpr_target));
  if (roc.empty()) throw MetricsError("empty ROC curve");
  std::size_t i = 0;
  while (i + 1 < roc.size() && roc[i + 1].fpr <= fpr_target) ++i;
  if (roc[i].fpr == fpr_target || i + 1 == roc.size()) return roc[i].tpr;
  const auto& a = roc[i];
  const auto& b = roc[i + 1];
  return a.tpr + (fpr_target - a.fpr) / (b.fpr - a.fpr) * (b.tpr - a.tpr);
}

double Confusion::precision() const { return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0; }
double Confusion::recall() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0; }
double Confusion::f1() const {
  const auto den = 2 * tp + fp + fn;
  return den ? 2.0 * static_cast<double>(tp) / static_cast<double>(den) : 0.0;
}

Confusion confusion_at(const ScoredSet& s, double threshold) {
  if (s.scores.size() != s.labels.size())
    throw MetricsError(fmt::format("{} scores for {} labels", s.scores.size(), s.labels.size()));
  Confusion c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool predicted = s.scores[i] > threshold;
    const bool actual = s.labels[i] == 1;
    (predicted ? (actual ? c.tp : c.fp) : (actual ? c.fn : c.tn))++;
  }
  return c;
}

EvalReport report(const ScoredSet& s, double threshold) {
  EvalReport r;
  r.threshold = threshold;
  r.confusion = confusion_at(s, threshold);
  r.precision = r.confusion.precision();
  r.recall = r.confusion.recall();
  r.f1 = r.confusion.f1();
  r.roc = roc_curve(s);
  r.auc = auc(r.roc);
  r.tpr20 = tpr_at_fpr(r.roc, 0.2);
  r.tpr40 = tpr_at_fpr(r.roc, 0.4);
  return r;
}

std::string render_report(const EvalReport& r) {
  fmt::memory_buffer out;
  auto it = std::back_inserter(out);
  fmt::format_to(it, "{:>8} {:>8} {:>8} {:>8}\n", "TPR@20", "TPR@40", "F1", "AUC");
  fmt::format_to(it, "{:>8.4f} {:>8.4f} {:>8.4f} {:>8.4f}\n", r.tpr20, r.tpr40, r.f1, r.auc);
  fmt::format_to(it, "threshold {} : TP {} FP {} TN {} FN {}\n", r.threshold, r.confusion.tp, r.confusion.fp,
                 r.confusion.tn, r.confusion.fn);
  fmt::format_to(it, "metric,value\n");
  fmt::format_to(it, "tp,{}\nfp,{}\ntn,{}\nfn,{}\n", r.confusion.tp, r.confusion.fp, r.confusion.tn, r.confusion.fn);
  fmt::format_to(it, "precision,{:.17g}\nrecall,{:.17g}\nf1,{:.17g}\nauc,{:.17g}\ntpr20,{:.17g}\ntpr40,{:.17g}\n",
                 r.precision, r.recall, r.f1, r.auc, r.tpr20, r.tpr40);
  return fmt::to_string(out);
}

std::string render_roc(const std::vector<RocPoint>& roc) {
  fmt::memory_buffer out;
  auto it = std::back_inserter(out);
  fmt::format_to(it, "fpr,tpr\n");
  for (const auto& p : roc) fmt::format_to(it, "{:.17g},{:.17g}\n", p.fpr, p.tpr);
  return fmt::to_string(out);
}

Predictions parse_predictions(std::string_view text) {
  Predictions p;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const auto line = lines[i];
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos)
      throw FormatError("prediction line must be name,prob,label", lineno);
    const auto name = line.substr(0, c1);
    const auto prob_tok = line.substr(c1 + 1, c2 - c1 - 1);
    const auto label_tok = line.substr(c2 + 1);
    if (name.empty()) throw FormatError("empty instance name", lineno);
    double prob = 0.0;
    const auto [pp, ec] = std::from_chars(prob_tok.data(), prob_tok.data() + prob_tok.size(), prob);
    if (ec != std::errc() || pp != prob_tok.data() + prob_tok.size() || !(prob >= 0.0 && prob <= 1.0))
      throw FormatError(fmt::format("probability must be a number in [0, 1], got '{}'", prob_tok), lineno);
    if (label_tok != "0" && label_tok != "1") throw FormatError("label not in {0,1}", lineno);
    p.names.emplace_back(name);
    p.minority_prob.push_back(prob);
    p.labels.push_back(label_tok == "1" ? 1 : 0);
  }
  return p;
}

ScoredSet join_with_labels(const Predictions& p, const LabelSet& truth) {
  ScoredSet s;
  s.scores = p.minority_prob;
  s.labels.reserve(p.size());
  for (const auto& name : p.names) {
    const auto it = truth.labels.find(name);
    if (it == truth.labels.end()) throw MetricsError(fmt::format("no label for predicted instance {}", name));
    s.labels.push_back(it->second);
  }
  if (truth.labels.size() != p.size())
    throw MetricsError(fmt::format("{} labels but {} predictions", truth.labels.size(), p.size()));
  return s;
}

}  // namespace imlg
