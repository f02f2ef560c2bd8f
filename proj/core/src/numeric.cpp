#include "imlg/numeric.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace imlg {

void check_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) throw NumericError(fmt::format("non-finite value in {}", what));
}

void check_matmul(const Matrix& a, const Matrix& b, const std::string& what) {
  if (a.cols() != b.rows())
    throw NumericError(fmt::format("shape mismatch in {}: {}x{} times {}x{}", what, a.rows(),
                                   a.cols(), b.rows(), b.cols()));
}

void check_same_shape(const Matrix& a, const Matrix& b, const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw NumericError(fmt::format("shape mismatch in {}: {}x{} vs {}x{}", what, a.rows(),
                                   a.cols(), b.rows(), b.cols()));
}

Matrix mean_aggregate(const NeighborLists& adj, const Matrix& x) {
  if (adj.size() != static_cast<std::size_t>(x.rows()))
    throw NumericError(fmt::format("mean_aggregate: {} adjacency rows vs {} feature rows",
                                   adj.size(), x.rows()));
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (std::size_t i = 0; i < adj.size(); ++i) {
    if (adj[i].empty()) continue;
    auto row = out.row(static_cast<Eigen::Index>(i));
    for (std::uint32_t j : adj[i]) row += x.row(j);
    row /= static_cast<double>(adj[i].size());
  }
  return out;
}

Matrix mean_aggregate_backward(const NeighborLists& adj, const Matrix& grad_out) {
  Matrix out = Matrix::Zero(grad_out.rows(), grad_out.cols());
  for (std::size_t i = 0; i < adj.size(); ++i) {
    if (adj[i].empty()) continue;
    const double w = 1.0 / static_cast<double>(adj[i].size());
    for (std::uint32_t j : adj[i]) out.row(j) += w * grad_out.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

Matrix concat_self_neighbor_diff(const Matrix& self, const Matrix& neigh) {
  check_same_shape(self, neigh, "concat_self_neighbor_diff");
  const auto d = self.cols();
  Matrix out(self.rows(), 3 * d);
  out.leftCols(d) = self;
  out.middleCols(d, d) = neigh;
  out.rightCols(d) = neigh - self;
  return out;
}

void concat_self_neighbor_diff_backward(const Matrix& grad_out, Matrix& d_self, Matrix& d_neigh) {
  const auto d = grad_out.cols() / 3;
  const auto g_diff = grad_out.rightCols(d);
  d_self = grad_out.leftCols(d) - g_diff;
  d_neigh = grad_out.middleCols(d, d) + g_diff;
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix relu_backward(const Matrix& pre_activation, const Matrix& grad_out) {
  check_same_shape(pre_activation, grad_out, "relu_backward");
  return (pre_activation.array() > 0.0).select(grad_out, 0.0);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix sigmoid(const Matrix& x) { return x.unaryExpr([](double v) { return sigmoid(v); }); }

Matrix sigmoid_backward(const Matrix& s, const Matrix& grad_out) {
  check_same_shape(s, grad_out, "sigmoid_backward");
  return grad_out.array() * s.array() * (1.0 - s.array());
}

Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    out.row(i) = logits.row(i).array() - lse;
  }
  return out;
}

Matrix log_softmax_rows_backward(const Matrix& log_probs, const Matrix& grad_out) {
  check_same_shape(log_probs, grad_out, "log_softmax_rows_backward");
  Matrix out(grad_out.rows(), grad_out.cols());
  for (Eigen::Index i = 0; i < grad_out.rows(); ++i) {
    const double s = grad_out.row(i).sum();
    out.row(i) = grad_out.row(i).array() - log_probs.row(i).array().exp() * s;
  }
  return out;
}

double masked_sq_frobenius(const Matrix& diff, const Matrix& mask) {
  check_same_shape(diff, mask, "masked_sq_frobenius");
  return (diff.array() * mask.array()).square().sum();
}

Matrix masked_sq_frobenius_backward(const Matrix& diff, const Matrix& mask) {
  check_same_shape(diff, mask, "masked_sq_frobenius_backward");
  return 2.0 * mask.array().square() * diff.array();
}

Matrix finite_difference_gradient(const std::function<double()>& loss, Matrix& param, double h) {
  Matrix grad(param.rows(), param.cols());
  for (Eigen::Index i = 0; i < param.rows(); ++i) {
    for (Eigen::Index j = 0; j < param.cols(); ++j) {
      const double saved = param(i, j);
      param(i, j) = saved + h;
      const double up = loss();
      param(i, j) = saved - h;
      const double down = loss();
      param(i, j) = saved;
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

double max_relative_error(const Matrix& analytic, const Matrix& numeric, double floor) {
  check_same_shape(analytic, numeric, "max_relative_error");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i];
    const double b = numeric.data()[i];
    const double denom = std::max({std::abs(a), std::abs(b), floor});
    worst = std::max(worst, std::abs(a - b) / denom);
  }
  return worst;
}

}  // namespace imlg
