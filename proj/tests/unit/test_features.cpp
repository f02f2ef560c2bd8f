#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "imlg/features.hpp"
#include "imlg/synthetic.hpp"

using namespace imlg;

namespace {

std::vector<double> v(std::initializer_list<double> x) { return x; }

}  // namespace

TEST(EncodeType, FixedOrder) {
  EXPECT_EQ(encode_type(InstanceType::LUT2), (std::array<double, 6>{1, 0, 0, 0, 0, 0}));
  EXPECT_EQ(encode_type(InstanceType::LUT4), (std::array<double, 6>{0, 0, 1, 0, 0, 0}));
  EXPECT_EQ(encode_type(InstanceType::FF), (std::array<double, 6>{0, 0, 0, 0, 0, 1}));
}

TEST(EncodeRegion, TwoLevels) {
  EXPECT_EQ(encode_region(3, 3, 16, 16, 2), v({1, 0, 0, 0, 1, 0, 0, 0}));
  EXPECT_EQ(encode_region(3.9, 3.9, 16, 16, 2), encode_region(3, 3, 16, 16, 2));
}

TEST(EncodeRegion, SplitLineGoesToLowerIndex) {
  EXPECT_EQ(encode_region(8, 8, 16, 16, 1), v({1, 0, 0, 0}));
  EXPECT_EQ(encode_region(8.5, 8, 16, 16, 1), v({0, 1, 0, 0}));
  EXPECT_EQ(encode_region(8, 8.5, 16, 16, 1), v({0, 0, 1, 0}));
  EXPECT_EQ(encode_region(15.9, 15.9, 16, 16, 1), v({0, 0, 0, 1}));
}

TEST(EncodeRegion, NonSquareLayout) {
  // Splits at extent / 2: x at 5, y at 3.
  EXPECT_EQ(encode_region(6, 1, 10, 6, 2), v({0, 1, 0, 0, 1, 0, 0, 0}));
}

TEST(EncodeRegion, Errors) {
  EXPECT_THROW(encode_region(16, 3, 16, 16, 2), std::out_of_range);
  EXPECT_THROW(encode_region(-0.1, 3, 16, 16, 2), std::out_of_range);
  EXPECT_THROW(encode_region(1, 1, 16, 16, 0), std::invalid_argument);
}

TEST(FeatureMatrix, TwoInstances) {
  const auto d = test::design(4, 4, {test::inst("a", InstanceType::LUT3, 0.5, 0.5), test::inst("b", InstanceType::FF, 3, 3)});
  const Matrix f = build_feature_matrix(d, EncoderConfig{1});
  ASSERT_EQ(f.rows(), 2);
  ASSERT_EQ(f.cols(), 10);
  EXPECT_DOUBLE_EQ(f.row(0).sum(), 2.0);
  EXPECT_DOUBLE_EQ(f.row(1).sum(), 2.0);
  EXPECT_EQ(f(0, 1), 1.0);
  EXPECT_EQ(f(1, 5), 1.0);
  EXPECT_EQ(f(0, 6), 1.0);
  EXPECT_EQ(f(1, 9), 1.0);
}

TEST(FeatureMatrix, PropertiesOnGeneratedDesigns) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GenConfig cfg;
    cfg.n_instances = 800;
    cfg.seed = seed;
    const auto d = generate_design(cfg).design;
    for (int depth = 1; depth <= 5; ++depth) {
      const EncoderConfig ec{depth};
      const Matrix f = build_feature_matrix(d, ec);
      ASSERT_EQ(f.cols(), 6 + 4 * depth);
      ASSERT_EQ(f.rows(), static_cast<Eigen::Index>(d.instances.size()));
      for (Eigen::Index i = 0; i < f.rows(); ++i) {
        EXPECT_EQ(f.row(i).sum(), depth + 1.0);
        for (Eigen::Index j = 0; j < f.cols(); ++j) ASSERT_TRUE(f(i, j) == 0.0 || f(i, j) == 1.0);
      }
    }
  }
}

TEST(FeatureMatrix, PrefixLocality) {
  // Two points sharing a level-l cell agree on the first 4*l region entries.
  Rng rng(5);
  const int w = 37, h = 23, depth = 5;
  for (int trial = 0; trial < 2000; ++trial) {
    const double x1 = rng.uniform(0, w), y1 = rng.uniform(0, h);
    const double x2 = rng.uniform(0, w), y2 = rng.uniform(0, h);
    const auto a = encode_region(x1, y1, w, h, depth);
    const auto b = encode_region(x2, y2, w, h, depth);
    double x0 = 0, y0 = 0, cw = w, ch = h;
    for (int l = 1; l <= depth; ++l) {
      const double mx = x0 + cw / 2, my = y0 + ch / 2;
      const bool same = (x1 <= mx) == (x2 <= mx) && (y1 <= my) == (y2 <= my);
      if (!same) break;
      for (int k = 0; k < 4 * l; ++k) ASSERT_EQ(a[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(k)]);
      if (x1 > mx) x0 = mx;
      if (y1 > my) y0 = my;
      cw /= 2;
      ch /= 2;
    }
  }
}

TEST(FeatureMatrix, SameCellSameTypeIdenticalRows) {
  const auto d = test::design(16, 16,
                              {test::inst("a", InstanceType::LUT6, 3.1, 3.2), test::inst("b", InstanceType::LUT6, 3.8, 3.4)});
  const Matrix f = build_feature_matrix(d, EncoderConfig{4});
  EXPECT_TRUE(f.row(0) == f.row(1));
}

TEST(EncoderConfig, DimensionStep) {
  for (int depth = 1; depth < 8; ++depth)
    EXPECT_EQ(EncoderConfig{depth + 1}.feature_dim() - EncoderConfig{depth}.feature_dim(), 4);
  EXPECT_EQ(EncoderConfig{}.feature_dim(), 22);
}
