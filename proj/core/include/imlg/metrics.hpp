#pragma once

// Binary-classification metrics. The positive class is the minority
// (unpacked) label 1 everywhere; a score counts as positive when it is
// strictly greater than the threshold.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "imlg/design.hpp"
#include "imlg/trainer.hpp"

namespace imlg {

class MetricsError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct ScoredSet {
  std::vector<double> scores;
  std::vector<int> labels;

  std::size_t size() const { return scores.size(); }
  std::size_t positives() const;
};

struct RocPoint {
  double fpr;
  double tpr;

  bool operator==(const RocPoint&) const = default;
};

/// Descending-score sweep, one point per tie group, from (0,0) to (1,1).
/// Throws MetricsError unless both classes are present.
std::vector<RocPoint> roc_curve(const ScoredSet& s);

/// Trapezoid rule.
double auc(const std::vector<RocPoint>& roc);

/// TPR at an FPR target, interpolating linearly between the bracketing
/// points; at a vertex the highest TPR at that FPR is returned.
double tpr_at_fpr(const std::vector<RocPoint>& roc, double fpr_target);

struct Confusion {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  double precision() const;
  double recall() const;
  /// 2TP / (2TP + FP + FN); 0 when the denominator is 0.
  double f1() const;
};

Confusion confusion_at(const ScoredSet& s, double threshold);
inline double f1_at(const ScoredSet& s, double threshold) { return confusion_at(s, threshold).f1(); }

struct EvalReport {
  Confusion confusion;
  double threshold = 0.5;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;
  double tpr20 = 0.0;
  double tpr40 = 0.0;
  std::vector<RocPoint> roc;
};

EvalReport report(const ScoredSet& s, double threshold = 0.5);

/// Aligned table followed by `metric,value` lines.
std::string render_report(const EvalReport& r);
/// `fpr,tpr` header and one line per ROC point.
std::string render_roc(const std::vector<RocPoint>& roc);

/// Reads `name,prob,label` lines.
Predictions parse_predictions(std::string_view text);

/// Pairs each prediction with its ground-truth label by name. Throws
/// MetricsError if a prediction has no label or a label has no prediction.
ScoredSet join_with_labels(const Predictions& p, const LabelSet& truth);

}  // namespace imlg
