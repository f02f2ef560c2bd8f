#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "imlg/numeric.hpp"

using namespace imlg;
using test::random_matrix;

namespace {

constexpr double kH = 1e-5;
constexpr double kTol = 1e-4;

/// Checks d/dX of sum(G .* f(X)) against central differences.
template <class Fwd, class Bwd>
void gradcheck(Matrix x, Fwd fwd, Bwd bwd, Rng& rng) {
  const Matrix y = fwd(x);
  const Matrix g = random_matrix(y.rows(), y.cols(), rng);
  const Matrix analytic = bwd(x, g);
  const Matrix numeric = finite_difference_gradient([&] { return fwd(x).cwiseProduct(g).sum(); }, x, kH);
  EXPECT_LE(max_relative_error(analytic, numeric, 1e-6), kTol);
}

/// Keeps entries away from ReLU's kink so central differences are valid.
Matrix off_kink(Matrix m) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (std::abs(m.data()[i]) < 1e-2) m.data()[i] = 0.1;
  return m;
}

}  // namespace

TEST(FiniteDifference, SquaredFrobeniusOfOnes) {
  Matrix w = Matrix::Ones(2, 2);
  const Matrix g = finite_difference_gradient([&] { return w.squaredNorm(); }, w, kH);
  EXPECT_LE((g - Matrix::Constant(2, 2, 2.0)).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(w, Matrix::Ones(2, 2));
}

TEST(FiniteDifference, QuadraticForm) {
  Rng rng(1);
  const Matrix A = random_matrix(5, 5, rng);
  Matrix x = random_matrix(5, 1, rng);
  const Matrix numeric = finite_difference_gradient([&] { return (x.transpose() * A * x)(0, 0); }, x, kH);
  const Matrix analytic = (A + A.transpose()) * x;
  EXPECT_LE(max_relative_error(analytic, numeric, 1e-8), 1e-8);
}

TEST(Sigmoid, ValueAndSlopeAtZero) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  const Matrix s = sigmoid(Matrix::Zero(1, 1));
  EXPECT_DOUBLE_EQ(sigmoid_backward(s, Matrix::Ones(1, 1))(0, 0), 0.25);
  EXPECT_NEAR(sigmoid(2.0), 0.8808, 1e-4);
  EXPECT_TRUE(std::isfinite(sigmoid(-800.0)));
  EXPECT_TRUE(std::isfinite(sigmoid(800.0)));
}

TEST(MaskedFrobenius, ValueAndGradient) {
  Rng rng(2);
  Matrix diff = random_matrix(4, 3, rng);
  const Matrix mask = random_matrix(4, 3, rng, 3.0);
  const double expected = (mask.cwiseProduct(diff)).squaredNorm();
  EXPECT_NEAR(masked_sq_frobenius(diff, mask), expected, 1e-12);
  const Matrix analytic = 2.0 * mask.cwiseProduct(mask).cwiseProduct(diff);
  EXPECT_LE(max_relative_error(masked_sq_frobenius_backward(diff, mask), analytic, 1e-12), 1e-12);
  const Matrix numeric = finite_difference_gradient([&] { return masked_sq_frobenius(diff, mask); }, diff, kH);
  EXPECT_LE(max_relative_error(analytic, numeric, 1e-6), kTol);
}

TEST(LogSoftmax, RowsNormalize) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Matrix logits = random_matrix(30, 2 + t % 4, rng, 50.0);
    const Matrix p = log_softmax_rows(logits).array().exp();
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-9);
      EXPECT_GE(p.row(i).minCoeff(), 0.0);
    }
  }
  const Matrix huge = (Matrix(1, 2) << 1000.0, -1000.0).finished();
  EXPECT_TRUE(log_softmax_rows(huge).allFinite());
}

TEST(MeanAggregate, MeanAndIsolatedZero) {
  NeighborLists adj{{1, 2}, {0}, {0}, {}};
  Matrix x(4, 2);
  x << 1, 1, 1, 0, 3, 2, 7, 7;
  const Matrix m = mean_aggregate(adj, x);
  EXPECT_EQ(m.row(0), (Matrix(1, 2) << 2, 1).finished());
  EXPECT_EQ(m.row(1), x.row(0));
  EXPECT_EQ(m.row(3), Matrix::Zero(1, 2));
}

TEST(Concat, Layout) {
  Matrix a(1, 2), b(1, 2);
  a << 1, 1;
  b << 2, 1;
  EXPECT_EQ(concat_self_neighbor_diff(a, b), (Matrix(1, 6) << 1, 1, 2, 1, 1, 0).finished());
}

TEST(GradCheck, EveryPrimitive) {
  Rng rng(4);
  const auto adj = test::random_graph(12, 0.3, rng);
  for (int t = 0; t < 5; ++t) {
    gradcheck(random_matrix(12, 3, rng), [&](const Matrix& x) { return mean_aggregate(adj, x); },
              [&](const Matrix&, const Matrix& g) { return mean_aggregate_backward(adj, g); }, rng);
    gradcheck(off_kink(random_matrix(6, 4, rng)), [](const Matrix& x) { return relu(x); },
              [](const Matrix& x, const Matrix& g) { return relu_backward(x, g); }, rng);
    gradcheck(random_matrix(6, 4, rng, 3.0), [](const Matrix& x) { return sigmoid(x); },
              [](const Matrix& x, const Matrix& g) { return sigmoid_backward(sigmoid(x), g); }, rng);
    gradcheck(random_matrix(6, 3, rng, 3.0), [](const Matrix& x) { return log_softmax_rows(x); },
              [](const Matrix& x, const Matrix& g) { return log_softmax_rows_backward(log_softmax_rows(x), g); },
              rng);
    const Matrix other = random_matrix(5, 3, rng);
    gradcheck(random_matrix(5, 3, rng), [&](const Matrix& x) { return concat_self_neighbor_diff(x, other); },
              [](const Matrix&, const Matrix& g) {
                Matrix ds, dn;
                concat_self_neighbor_diff_backward(g, ds, dn);
                return ds;
              },
              rng);
    gradcheck(random_matrix(5, 3, rng), [&](const Matrix& x) { return concat_self_neighbor_diff(other, x); },
              [](const Matrix&, const Matrix& g) {
                Matrix ds, dn;
                concat_self_neighbor_diff_backward(g, ds, dn);
                return dn;
              },
              rng);
    const Matrix w = random_matrix(3, 4, rng);
    gradcheck(random_matrix(5, 3, rng), [&](const Matrix& x) { return Matrix(x * w); },
              [&](const Matrix&, const Matrix& g) { return Matrix(g * w.transpose()); }, rng);
  }
}

TEST(Checks, ShapeAndFiniteness) {
  EXPECT_THROW(check_matmul(Matrix::Zero(2, 3), Matrix::Zero(2, 3), "m"), NumericError);
  EXPECT_NO_THROW(check_matmul(Matrix::Zero(2, 3), Matrix::Zero(3, 1), "m"));
  EXPECT_THROW(check_same_shape(Matrix::Zero(2, 3), Matrix::Zero(3, 2), "s"), NumericError);
  Matrix bad = Matrix::Zero(2, 2);
  bad(1, 1) = std::nan("");
  EXPECT_THROW(check_finite(bad, "bad"), NumericError);
  bad(1, 1) = INFINITY;
  EXPECT_THROW(check_finite(bad, "bad"), NumericError);
  EXPECT_THROW(concat_self_neighbor_diff(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), NumericError);
}
