#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "lidarsim/error.hpp"
#include "lidarsim/metrics.hpp"

namespace lidarsim {
namespace {

using testing::Rng;

GaussianSummary random_summary(Rng& rng, int dim, int rank = -1) {
  if (rank < 0) rank = dim;
  Eigen::MatrixXd a(dim, rank);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < rank; ++j) a(i, j) = testing::uniform(rng, -1, 1);
  }
  GaussianSummary g;
  g.mean = Eigen::VectorXd(dim);
  for (int i = 0; i < dim; ++i) g.mean(i) = testing::uniform(rng, -2, 2);
  g.covariance = a * a.transpose();
  return g;
}

GaussianSummary diagonal(const std::vector<double>& mean, const std::vector<double>& var) {
  GaussianSummary g;
  g.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  g.covariance = Eigen::VectorXd::Map(var.data(), static_cast<Eigen::Index>(var.size())).asDiagonal();
  return g;
}

TEST(Frechet, OneDimensionalShift) {
  EXPECT_NEAR(frechet_distance(diagonal({0.0}, {1.0}), diagonal({3.0}, {1.0})), 9.0, 1e-12);
  // 1-D closed form: dmu^2 + (sigma_a - sigma_b)^2.
  EXPECT_NEAR(frechet_distance(diagonal({1.0}, {4.0}), diagonal({0.0}, {9.0})), 1.0 + 1.0, 1e-12);
}

TEST(Frechet, SelfDistanceIsZero) {
  Rng rng(51);
  for (int dim : {1, 2, 8, 32, 64}) {
    const GaussianSummary g = random_summary(rng, dim);
    EXPECT_LE(frechet_distance(g, g), 1e-6) << dim;
    const GaussianSummary low = random_summary(rng, dim, std::max(1, dim / 4));
    EXPECT_LE(frechet_distance(low, low), 1e-6) << dim;
  }
}

TEST(Frechet, DiagonalClosedForm) {
  Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = testing::uniform_int(rng, 1, 40);
    std::vector<double> ma(dim), mb(dim), va(dim), vb(dim);
    double expected = 0.0;
    for (int i = 0; i < dim; ++i) {
      ma[i] = testing::uniform(rng, -3, 3);
      mb[i] = testing::uniform(rng, -3, 3);
      va[i] = testing::uniform(rng, 0, 4);
      vb[i] = testing::uniform(rng, 0, 4);
      expected += (ma[i] - mb[i]) * (ma[i] - mb[i]) +
                  (std::sqrt(va[i]) - std::sqrt(vb[i])) * (std::sqrt(va[i]) - std::sqrt(vb[i]));
    }
    EXPECT_NEAR(frechet_distance(diagonal(ma, va), diagonal(mb, vb)), expected, 1e-9);
  }
}

TEST(Frechet, SymmetricAndNonNegative) {
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = testing::uniform_int(rng, 1, 16);
    const GaussianSummary a = random_summary(rng, dim);
    const GaussianSummary b = random_summary(rng, dim);
    const double ab = frechet_distance(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_NEAR(ab, frechet_distance(b, a), 1e-8 * std::max(1.0, ab));
  }
}

TEST(Frechet, RejectsBadInput) {
  GaussianSummary neg = diagonal({0.0, 0.0}, {1.0, -0.5});
  try {
    frechet_distance(neg, diagonal({0.0, 0.0}, {1.0, 1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPsd);
  }
  GaussianSummary asym = diagonal({0.0, 0.0}, {1.0, 1.0});
  asym.covariance(0, 1) = 0.3;
  EXPECT_THROW(asym.validate(), Error);
  try {
    frechet_distance(diagonal({0.0}, {1.0}), diagonal({0.0, 0.0}, {1.0, 1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
}

TEST(FitGaussian, MeanAndUnbiasedCovariance) {
  const std::vector<Eigen::VectorXd> f = {Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 0),
                                          Eigen::Vector2d(0, 2), Eigen::Vector2d(2, 2)};
  const GaussianSummary g = fit_gaussian(f);
  EXPECT_TRUE(g.mean.isApprox(Eigen::Vector2d(1, 1)));
  EXPECT_NEAR(g.covariance(0, 0), 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(g.covariance(0, 1), 0.0, 1e-12);
  try {
    fit_gaussian(std::span(f).first(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientSamples);
  }
  std::vector<Eigen::VectorXd> ragged = f;
  ragged.push_back(Eigen::Vector3d(1, 2, 3));
  EXPECT_THROW(fit_gaussian(ragged), Error);
}

TEST(FeatureSet, SerializeParseRoundTrip) {
  FeatureSet set;
  set.count = 3;
  set.dimension = 2;
  set.values = {1.0F, 2.0F, 3.0F, -4.5F, 0.0F, 1e-7F};
  const auto bytes = set.serialize();
  EXPECT_EQ(bytes.size(), 8U + 24U);
  EXPECT_EQ(bytes[0], std::byte{3});
  const FeatureSet back = FeatureSet::parse(bytes);
  EXPECT_EQ(back.values, set.values);
  EXPECT_EQ(back.dimension, 2U);
  const GaussianSummary g = fit_gaussian(back);
  EXPECT_NEAR(g.mean(0), (1.0 + 3.0 + 0.0) / 3.0, 1e-7);

  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(FeatureSet::parse(truncated), Error);
  EXPECT_THROW(FeatureSet::parse(std::span(bytes).first(4)), Error);
}

TEST(ImageError, MatchesNaiveOracle) {
  Rng rng(54);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = testing::uniform_int(rng, 1, 40);
    const int h = testing::uniform_int(rng, 1, 20);
    IntensityImage pred(w, h);
    PolarGridImage truth(h, w);
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    int n = 0;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        pred.at(r, c) = static_cast<float>(testing::uniform(rng, 0, 1));
        truth.intensity.at(r, c) = static_cast<float>(testing::uniform(rng, 0, 1));
        truth.valid.at(r, c) = (r == 0 && c == 0) || testing::uniform(rng, 0, 1) < 0.5;
        if (truth.valid.at(r, c)) {
          const double d = double(pred.at(r, c)) - double(truth.intensity.at(r, c));
          abs_sum += std::abs(d);
          sq_sum += d * d;
          ++n;
        }
      }
    }
    const ImageError e = image_error(pred, truth);
    EXPECT_EQ(e.count, static_cast<std::size_t>(n));
    EXPECT_NEAR(e.mae, abs_sum / n, 1e-12);
    EXPECT_NEAR(e.rmse, std::sqrt(sq_sum / n), 1e-12);
  }
}

TEST(ImageError, Errors) {
  PolarGridImage truth(2, 2);
  try {
    image_error(IntensityImage(2, 2), truth);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyValidSet);
  }
  EXPECT_THROW(image_error(IntensityImage(3, 2), truth), Error);
}

TEST(CloudStats, CountsLinesAndHistograms) {
  SparsifyConfig cfg;
  cfg.n_lines = 4;
  PointCloud cloud;
  const double top_center = cfg.line_center(0);
  cloud.points.push_back(Point{static_cast<float>(11 * std::cos(top_center)), 0,
                               static_cast<float>(11 * std::sin(top_center)), 0.05F});
  cloud.points.push_back(Point{0, 0, 50.0F, 1.0F});  // straight up
  cloud.points.push_back(Point{100.0F, 0, 0, 0.55F});
  const CloudStats s = cloud_stats(cloud, cfg);
  EXPECT_EQ(s.point_count, 3U);
  EXPECT_EQ(s.per_line[0], 2U);
  EXPECT_EQ(s.outside_lines, 1U);
  EXPECT_EQ(s.intensity_histogram[0], 1U);
  EXPECT_EQ(s.intensity_histogram[5], 1U);
  EXPECT_EQ(s.intensity_histogram[9], 1U);
  EXPECT_EQ(s.range_histogram[2], 1U);
  EXPECT_EQ(s.range_histogram[10], 1U);
  EXPECT_EQ(s.range_histogram[15], 1U);
  EXPECT_NE(s.to_json().find("\"point_count\": 3"), std::string::npos);
}

}  // namespace
}  // namespace lidarsim
