#pragma once

// Dense 64-bit matrix primitives with hand-written reverse-mode partners.
//
// Every `foo_backward` takes the upstream gradient of the forward output and
// returns (or accumulates) the gradient with respect to the forward inputs.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace imlg {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Throws NumericError naming `what` if any entry is NaN or infinite.
void check_finite(const Matrix& m, const std::string& what);

/// Throws NumericError unless a.cols() == b.rows().
void check_matmul(const Matrix& a, const Matrix& b, const std::string& what);
void check_same_shape(const Matrix& a, const Matrix& b, const std::string& what);

/// Undirected neighbor lists; row i lists the neighbors of node i.
using NeighborLists = std::vector<std::vector<std::uint32_t>>;

/// Row i = mean of X over N(i); zero row when N(i) is empty.
Matrix mean_aggregate(const NeighborLists& adj, const Matrix& x);

/// Gradient w.r.t. X of mean_aggregate, given the upstream gradient.
Matrix mean_aggregate_backward(const NeighborLists& adj, const Matrix& grad_out);

/// [A, B, B - A] column-wise. A and B must share a shape.
Matrix concat_self_neighbor_diff(const Matrix& self, const Matrix& neigh);

/// Splits the gradient of concat_self_neighbor_diff into (d self, d neigh).
void concat_self_neighbor_diff_backward(const Matrix& grad_out, Matrix& d_self, Matrix& d_neigh);

Matrix relu(const Matrix& x);
/// grad_out masked by (pre_activation > 0).
Matrix relu_backward(const Matrix& pre_activation, const Matrix& grad_out);

double sigmoid(double x);
Matrix sigmoid(const Matrix& x);
/// grad_out * s * (1 - s), given s = sigmoid(x).
Matrix sigmoid_backward(const Matrix& s, const Matrix& grad_out);

/// Numerically stable row-wise log-softmax.
Matrix log_softmax_rows(const Matrix& logits);
Matrix log_softmax_rows_backward(const Matrix& log_probs, const Matrix& grad_out);

/// sum_ij (mask_ij * diff_ij)^2
double masked_sq_frobenius(const Matrix& diff, const Matrix& mask);
/// d/d diff of masked_sq_frobenius: 2 * mask^2 * diff.
Matrix masked_sq_frobenius_backward(const Matrix& diff, const Matrix& mask);

/// Central differences of `loss` with respect to every entry of `param`,
/// perturbing in place and restoring afterwards.
Matrix finite_difference_gradient(const std::function<double()>& loss, Matrix& param, double h);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor)
double max_relative_error(const Matrix& analytic, const Matrix& numeric, double floor);

}  // namespace imlg
