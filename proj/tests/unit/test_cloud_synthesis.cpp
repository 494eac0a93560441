#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "lidarsim/cloud_synthesis.hpp"
#include "lidarsim/error.hpp"
#include "lidarsim/reprojection.hpp"

namespace lidarsim {
namespace {

using testing::Rng;

TEST(SparsifyConfig, BinsAndCenters) {
  SparsifyConfig cfg;
  cfg.n_lines = 32;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.line_for(cfg.elevation_max), 0);
  EXPECT_EQ(cfg.line_for(cfg.elevation_min), 31);
  EXPECT_EQ(cfg.line_for(cfg.elevation_max + 1e-6), -1);
  EXPECT_EQ(cfg.line_for(cfg.elevation_min - 1e-6), -1);
  for (int l = 0; l < 32; ++l) EXPECT_EQ(cfg.line_for(cfg.line_center(l)), l);
  cfg.n_lines = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.n_lines = 129;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.n_lines = 4;
  cfg.elevation_min = cfg.elevation_max;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(DepthToCloud, BackprojectsValidPixelsInOrder) {
  const CalibrationSet calib = testing::kitti_calibration();
  DepthImage depth(3, 2);
  depth.at(0, 2) = 10.0F;
  depth.at(1, 0) = 20.0F;
  const PointCloud cloud = depth_to_cloud(depth, calib, 600, 170);
  ASSERT_EQ(cloud.size(), 2U);
  const CameraModel cam(calib);
  const PixelProjection a = cam.project(cloud.points[0].x * Eigen::Vector3d::UnitX() +
                                        cloud.points[0].y * Eigen::Vector3d::UnitY() +
                                        cloud.points[0].z * Eigen::Vector3d::UnitZ());
  EXPECT_NEAR(a.u, 602.0, 1e-3);
  EXPECT_NEAR(a.v, 170.0, 1e-3);
  EXPECT_NEAR(a.depth, 10.0, 1e-4);
  EXPECT_EQ(cloud.points[1].intensity, 0.0F);
  try {
    depth_to_cloud(DepthImage(3, 3), calib);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCloud);
  }
}

TEST(AssignIntensity, NearestUpscaleAndPlacement) {
  const CalibrationSet calib = CalibrationSet::identity_chain();
  // Identity chain: LiDAR (x, -u*x, -v*x) lands on pixel (u, v).
  auto at_pixel = [](double u, double v) {
    const float x = 10.0F;
    return Point{x, static_cast<float>(-u * x), static_cast<float>(-v * x), 0.7F};
  };
  IntensityImage src(2, 2);
  src.at(0, 0) = 0.1F;
  src.at(0, 1) = 0.2F;
  src.at(1, 0) = 0.3F;
  src.at(1, 1) = 0.4F;
  IntensityPlacement place;
  place.target_width = 4;
  place.target_height = 4;
  place.origin_u = 0;
  place.origin_v = 0;
  PointCloud cloud;
  cloud.points = {at_pixel(0, 0), at_pixel(1, 1), at_pixel(2, 1), at_pixel(3, 3),
                  at_pixel(4, 0), at_pixel(-1, 0)};
  const PointCloud out = assign_intensity(cloud, src, place, calib);
  EXPECT_EQ(out.points[0].intensity, 0.1F);
  EXPECT_EQ(out.points[1].intensity, 0.1F);
  EXPECT_EQ(out.points[2].intensity, 0.2F);
  EXPECT_EQ(out.points[3].intensity, 0.4F);
  EXPECT_EQ(out.points[4].intensity, 0.0F);  // outside the placement
  EXPECT_EQ(out.points[5].intensity, 0.0F);
  EXPECT_EQ(out.points[0].x, cloud.points[0].x);

  place.origin_u = 2;
  EXPECT_EQ(assign_intensity(cloud, src, place, calib).points[2].intensity, 0.1F);

  PointCloud behind;
  behind.points = {Point{-5.0F, 0.0F, 0.0F, 0.9F}};
  EXPECT_EQ(assign_intensity(behind, src, place, calib).points[0].intensity, 0.0F);
}

TEST(DropZero, RemovesExactlyTheZeros) {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    PointCloud cloud = testing::random_cloud(rng, rng() % 2000);
    std::size_t zeros = 0;
    for (auto& p : cloud.points) {
      if (testing::uniform(rng, 0, 1) < 0.3) p.intensity = 0.0F;
      zeros += p.intensity == 0.0F;
    }
    const PointCloud out = drop_zero_intensity(cloud);
    ASSERT_EQ(out.size(), cloud.size() - zeros);
    for (const auto& p : out.points) ASSERT_NE(p.intensity, 0.0F);
  }
}

TEST(DropZero, KeepsOrderAndRespectsProbability) {
  PointCloud cloud;
  for (int i = 0; i < 10000; ++i) {
    cloud.points.push_back(Point{static_cast<float>(i), 0, 0, i % 2 == 0 ? 0.0F : 0.5F});
  }
  DropOptions opt;
  opt.drop_probability = 0.0;
  EXPECT_EQ(drop_zero_intensity(cloud, opt).size(), cloud.size());
  opt.drop_probability = 0.5;
  opt.seed = 99;
  const PointCloud half = drop_zero_intensity(cloud, opt);
  EXPECT_NEAR(static_cast<double>(half.size()), 7500.0, 200.0);
  for (std::size_t i = 1; i < half.size(); ++i) ASSERT_LT(half.points[i - 1].x, half.points[i].x);
  EXPECT_EQ(drop_zero_intensity(cloud, opt).points.size(), half.size());
  opt.threshold = 0.6F;
  opt.drop_probability = 1.0;
  EXPECT_TRUE(drop_zero_intensity(cloud, opt).points.empty());
  opt.drop_probability = 1.5;
  EXPECT_THROW(drop_zero_intensity(cloud, opt), Error);
}

// Oracle: explicit bin edges, brute-force best point per cell.
struct OracleCell {
  std::size_t index;
  double distance;
};

std::map<std::pair<int, int>, OracleCell> oracle_sparsify(const PointCloud& cloud,
                                                          const SparsifyConfig& cfg) {
  const double width = (cfg.elevation_max - cfg.elevation_min) / cfg.n_lines;
  std::map<std::pair<int, int>, OracleCell> cells;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    const double el = std::atan2(double(p.z), std::hypot(double(p.x), double(p.y)));
    if (el < cfg.elevation_min || el > cfg.elevation_max) continue;
    int line = -1;
    for (int l = 0; l < cfg.n_lines; ++l) {
      const double top = cfg.elevation_max - l * width;
      const double bottom = cfg.elevation_max - (l + 1) * width;
      if (line < 0 && el <= top && el >= bottom) line = l;  // upper bin owns a shared edge
    }
    if (line < 0) continue;
    const int col = cfg.column_for(std::atan2(double(p.y), double(p.x)));
    const double center = cfg.elevation_max - (line + 0.5) * width;
    const double d = std::abs(el - center);
    const auto key = std::make_pair(line, col);
    const auto it = cells.find(key);
    if (it == cells.end() || d < it->second.distance) cells[key] = {i, d};
  }
  return cells;
}

TEST(Sparsify, MatchesBinMembershipOracle) {
  Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    testing::ScanSpec spec;
    spec.grid.full_cols = testing::uniform_int(rng, 50, 400);
    spec.grid.crop_cols = std::min(spec.grid.crop_cols, spec.grid.full_cols);
    spec.dropout = 0.2;
    PointCloud cloud = testing::make_scan(spec, rng).cloud;
    // Random extra points, some outside the elevation span.
    for (int i = 0; i < 500; ++i) {
      const double az = testing::uniform(rng, -3.14, 3.14);
      const double el = testing::uniform(rng, -0.6, 0.2);
      const double r = testing::uniform(rng, 1, 60);
      cloud.points.push_back(Point{static_cast<float>(r * std::cos(el) * std::cos(az)),
                                   static_cast<float>(r * std::cos(el) * std::sin(az)),
                                   static_cast<float>(r * std::sin(el)), 0.5F});
    }
    SparsifyConfig cfg = SparsifyConfig::from_grid(spec.grid, trial % 2 ? 32 : 16);
    const LineTaggedCloud out = sparsify_to_lines(cloud, cfg);
    const auto oracle = oracle_sparsify(cloud, cfg);
    ASSERT_EQ(out.cloud.size(), oracle.size());
    std::size_t k = 0;
    for (const auto& [key, cell] : oracle) {
      ASSERT_EQ(out.line[k], key.first);
      ASSERT_EQ(out.cloud.points[k].x, cloud.points[cell.index].x);
      ASSERT_EQ(out.cloud.points[k].y, cloud.points[cell.index].y);
      ++k;
    }
  }
}

TEST(Sparsify, SixtyFourToThirtyTwo) {
  Rng rng(33);
  testing::ScanSpec spec;
  const PointCloud cloud = testing::make_scan(spec, rng).cloud;
  const SparsifyConfig cfg = SparsifyConfig::from_grid(spec.grid, 32);
  const LineTaggedCloud out = sparsify_to_lines(cloud, cfg);
  const std::set<int> lines(out.line.begin(), out.line.end());
  EXPECT_EQ(lines.size(), 32U);
  // Each target line covers two source lines; one point per column survives.
  EXPECT_EQ(out.cloud.size(), static_cast<std::size_t>(32 * spec.grid.full_cols));
  for (std::size_t i = 0; i < out.cloud.size(); ++i) {
    const double el = elevation_of(out.cloud.points[i]);
    const double top = cfg.elevation_max - out.line[i] * cfg.bin_width();
    ASSERT_LE(el, top + 1e-12);
    ASSERT_GE(el, top - cfg.bin_width() - 1e-12);
  }
}

TEST(Sparsify, EmptyInput) {
  EXPECT_TRUE(sparsify_to_lines(PointCloud{}, SparsifyConfig{}).cloud.empty());
}

}  // namespace
}  // namespace lidarsim
