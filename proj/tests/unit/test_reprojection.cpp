#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "fixtures.hpp"
#include "lidarsim/error.hpp"
#include "lidarsim/reprojection.hpp"

namespace lidarsim {
namespace {

using testing::Rng;

// Oracle: solve the 4x4 system M [X;1] = w [u v 1], (R0 Tr [X;1]).z = depth
// for (X, Y, Z, w) directly in LiDAR coordinates.
Eigen::Vector3d oracle_backproject(const CalibrationSet& calib, double u, double v, double depth) {
  Eigen::Matrix4d tr = Eigen::Matrix4d::Identity();
  tr.topRows<3>() = calib.lidar_to_cam;
  Eigen::Matrix4d r0 = Eigen::Matrix4d::Identity();
  r0.topLeftCorner<3, 3>() = calib.rectification;
  const Eigen::Matrix4d chain = r0 * tr;
  const Eigen::Matrix<double, 3, 4> m = calib.cam_projection * chain;
  Eigen::Matrix4d a;
  Eigen::Vector4d b;
  const double pix[3] = {u, v, 1.0};
  for (int i = 0; i < 3; ++i) {
    a.row(i) << m(i, 0), m(i, 1), m(i, 2), -pix[i];
    b(i) = -m(i, 3);
  }
  a.row(3) << chain(2, 0), chain(2, 1), chain(2, 2), 0.0;
  b(3) = depth - chain(2, 3);
  return a.fullPivLu().solve(b).head<3>();
}

int oracle_row(const std::vector<double>& table, double elevation) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < table.size(); ++r) {
    const double d = std::abs(elevation - table[r]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(r);
    }
  }
  const double spacing = std::abs(table[1] - table[0]);
  return best_d <= spacing / 2.0 ? best : -1;
}

int oracle_column(double azimuth, const PolarGridConfig& cfg) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double turned = cfg.azimuth_zero - azimuth;
  while (turned < 0.0) turned += kTwoPi;
  while (turned >= kTwoPi) turned -= kTwoPi;
  return std::min(static_cast<int>(turned / (kTwoPi / cfg.full_cols)), cfg.full_cols - 1);
}

MaskImage oracle_dilate(const MaskImage& mask, int radius) {
  MaskImage out(mask.width(), mask.height());
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      for (int rr = 0; rr < mask.height(); ++rr) {
        for (int cc = 0; cc < mask.width(); ++cc) {
          if (mask.at(rr, cc) && std::abs(rr - r) <= radius && std::abs(cc - c) <= radius) {
            out.at(r, c) = 1;
          }
        }
      }
    }
  }
  return out;
}

MaskImage oracle_edges(const IdImage& inst, const IdImage& sem) {
  MaskImage out(inst.width(), inst.height());
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  for (int r = 0; r < inst.height(); ++r) {
    for (int c = 0; c < inst.width(); ++c) {
      for (int k = 0; k < 4; ++k) {
        const int rr = r + dr[k];
        const int cc = c + dc[k];
        if (!inst.contains(rr, cc)) continue;
        const bool differs = inst.at(r, c) != inst.at(rr, cc) ||
                             (inst.at(r, c) == 0 && sem.at(r, c) != sem.at(rr, cc));
        if (differs) out.at(r, c) = 1;
      }
    }
  }
  return out;
}

TEST(CameraModel, IdentityChain) {
  const CameraModel cam(CalibrationSet::identity_chain());
  const PixelProjection p = cam.project(Eigen::Vector3d(10.0, 2.0, -1.0));
  EXPECT_NEAR(p.u, -0.2, 1e-15);
  EXPECT_NEAR(p.v, 0.1, 1e-15);
  EXPECT_NEAR(p.depth, 10.0, 1e-15);
  EXPECT_TRUE(cam.backproject(0.0, 0.0, 10.0).isApprox(Eigen::Vector3d(10.0, 0.0, 0.0)));
}

TEST(CameraModel, RejectsBehindCameraAndBadDepth) {
  const CalibrationSet calib = testing::kitti_calibration();
  try {
    project_lidar_to_camera(Eigen::Vector3d(-10.0, 0.0, 0.0), calib);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBehindCamera);
  }
  PixelProjection out;
  EXPECT_FALSE(CameraModel(calib).try_project(Eigen::Vector3d(0.0, 5.0, 0.0), out));
  for (double d : {0.0, -1.0, std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::infinity()}) {
    try {
      backproject_pixel(600.0, 170.0, d, calib);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidDepth);
    }
  }
}

TEST(CameraModel, BackprojectMatchesOracle) {
  Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    const CalibrationSet calib = i == 0 ? testing::kitti_calibration() : testing::random_calibration(rng);
    const double u = testing::uniform(rng, 0, 1242);
    const double v = testing::uniform(rng, 0, 375);
    const double d = testing::uniform(rng, 1, 80);
    const Eigen::Vector3d lib = backproject_pixel(u, v, d, calib);
    const Eigen::Vector3d ref = oracle_backproject(calib, u, v, d);
    ASSERT_LT((lib - ref).norm(), 1e-9) << i;
  }
}

TEST(CameraModel, RoundTripProperty) {
  Rng rng(22);
  for (int i = 0; i < 2000; ++i) {
    const CameraModel cam(testing::random_calibration(rng));
    const double u = testing::uniform(rng, 0, 1242);
    const double v = testing::uniform(rng, 0, 375);
    const double d = testing::uniform(rng, 1, 80);
    const PixelProjection p = cam.project(cam.backproject(u, v, d));
    ASSERT_NEAR(p.u, u, 1e-6);
    ASSERT_NEAR(p.v, v, 1e-6);
    ASSERT_NEAR(p.depth, d, 1e-9);
  }
}

struct ConstructedFrame {
  CameraFrame frame;
  CalibrationSet calib;
};

// Background wall at `far`, rectangles at `near`: their outlines straddle
// cells with a large range gap.
ConstructedFrame make_occluding_frame(Rng& rng, int width, int height, double near, double far) {
  ConstructedFrame out;
  out.calib = testing::kitti_calibration();
  CameraFrame& f = out.frame;
  f.origin_u = 470;
  f.origin_v = 150;
  f.depth = DepthImage(width, height, static_cast<float>(far));
  f.semantic = IdImage(width, height, 7);
  f.instance = IdImage(width, height, 0);
  f.rgb = RgbImage(width, height, Rgb{10, 20, 30});
  for (int box = 1; box <= 4; ++box) {
    const int u0 = testing::uniform_int(rng, 0, width - 20);
    const int v0 = testing::uniform_int(rng, 0, height - 20);
    const int w = testing::uniform_int(rng, 5, 40);
    const int h = testing::uniform_int(rng, 5, 40);
    for (int r = v0; r < std::min(height, v0 + h); ++r) {
      for (int c = u0; c < std::min(width, u0 + w); ++c) {
        f.depth.at(r, c) = static_cast<float>(near + 0.01 * box);
        f.semantic.at(r, c) = 26;
        f.instance.at(r, c) = box;
      }
    }
  }
  // A few holes.
  for (int k = 0; k < 50; ++k) {
    f.depth.at(testing::uniform_int(rng, 0, height - 1), testing::uniform_int(rng, 0, width - 1)) = 0.0F;
  }
  return out;
}

TEST(ProjectToGrid, MatchesCellOracle) {
  Rng rng(23);
  const PolarGridConfig cfg;
  const std::vector<double> table = default_elevation_table();
  for (int trial = 0; trial < 4; ++trial) {
    const auto [frame, calib] = make_occluding_frame(rng, 300, 120, 6.0, 30.0);
    const ProjectedFrame out = project_camera_to_lidar_grid(frame, calib, cfg);

    const int cells = cfg.crop_rows * cfg.crop_cols;
    std::vector<int> count(static_cast<std::size_t>(cells), 0);
    std::vector<double> lo(static_cast<std::size_t>(cells), 1e300);
    std::vector<double> hi(static_cast<std::size_t>(cells), -1e300);
    std::vector<float> winner_depth(static_cast<std::size_t>(cells), 0.0F);
    for (int v = 0; v < frame.height(); ++v) {
      for (int u = 0; u < frame.width(); ++u) {
        const float d = frame.depth.at(v, u);
        if (d <= 0.0F) continue;
        const Eigen::Vector3d p = oracle_backproject(calib, u + frame.origin_u, v + frame.origin_v, d);
        const int row = oracle_row(table, std::atan2(p.z(), std::hypot(p.x(), p.y())));
        const int col = oracle_column(std::atan2(p.y(), p.x()), cfg);
        if (row < 0 || row >= cfg.crop_rows || col >= cfg.crop_cols) continue;
        const auto cell = static_cast<std::size_t>(row * cfg.crop_cols + col);
        ++count[cell];
        const double range = p.norm();
        if (range < lo[cell]) {
          lo[cell] = range;
          winner_depth[cell] = d;
        }
        hi[cell] = std::max(hi[cell], range);
      }
    }
    int occluded = 0;
    for (int r = 0; r < cfg.crop_rows; ++r) {
      for (int c = 0; c < cfg.crop_cols; ++c) {
        const auto cell = static_cast<std::size_t>(r * cfg.crop_cols + c);
        const bool expect_occluded = count[cell] >= 2 && hi[cell] - lo[cell] > 1.0;
        occluded += expect_occluded;
        ASSERT_EQ(out.occlusion_mask.at(r, c) != 0, expect_occluded) << r << "," << c;
        ASSERT_EQ(out.coverage.at(r, c) != 0, count[cell] > 0);
        if (count[cell] > 0) ASSERT_EQ(out.depth.at(r, c), winner_depth[cell]);
      }
    }
    EXPECT_GT(occluded, 0);
  }
}

TEST(ProjectToGrid, NearestContributorCarriesLayers) {
  // Two pixels landing in one cell: the nearer one's ids win.
  const CalibrationSet calib = testing::kitti_calibration();
  CameraFrame frame;
  frame.depth = DepthImage(2, 1);
  frame.semantic = IdImage(2, 1);
  frame.instance = IdImage(2, 1);
  frame.origin_u = 609;
  frame.origin_v = 172;
  frame.depth.at(0, 0) = 40.0F;
  frame.depth.at(0, 1) = 10.0F;
  frame.semantic.at(0, 0) = 7;
  frame.semantic.at(0, 1) = 26;
  frame.instance.at(0, 1) = 3;
  const ProjectedFrame out = project_camera_to_lidar_grid(frame, calib, PolarGridConfig{});
  int hits = 0;
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      if (!out.coverage.at(r, c)) continue;
      ++hits;
      if (out.occlusion_mask.at(r, c)) {
        EXPECT_EQ(out.semantic.at(r, c), 26);
        EXPECT_EQ(out.instance.at(r, c), 3);
        EXPECT_EQ(out.depth.at(r, c), 10.0F);
      }
    }
  }
  EXPECT_GE(hits, 1);
}

TEST(ProjectToGrid, EmptyProjectionThrows) {
  CameraFrame frame;
  frame.depth = DepthImage(4, 4);
  try {
    project_camera_to_lidar_grid(frame, testing::kitti_calibration(), PolarGridConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyProjection);
  }
  frame.semantic = IdImage(3, 4);
  EXPECT_THROW(frame.validate(), Error);
}

TEST(Dilation, MatchesBruteForce) {
  Rng rng(24);
  for (int trial = 0; trial < 60; ++trial) {
    const int w = testing::uniform_int(rng, 1, 30);
    const int h = testing::uniform_int(rng, 1, 30);
    MaskImage mask(w, h);
    const double density = testing::uniform(rng, 0.0, 0.2);
    for (auto& v : mask.pixels()) v = testing::uniform(rng, 0, 1) < density ? 1 : 0;
    const int radius = testing::uniform_int(rng, 0, 3);
    ASSERT_EQ(dilate_square(mask, radius), oracle_dilate(mask, radius));
  }
}

TEST(Dilation, GenerousMaskOnlyTouchesMask) {
  ProjectedFrame f(5, 5);
  f.occlusion_mask.at(2, 2) = 1;
  f.semantic.at(0, 0) = 9;
  const ProjectedFrame out = mask_occlusions_generously(f, 1);
  EXPECT_EQ(out.occlusion_mask, oracle_dilate(f.occlusion_mask, 1));
  EXPECT_EQ(out.semantic, f.semantic);
}

TEST(EdgeMap, MatchesBruteForce) {
  Rng rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = testing::uniform_int(rng, 1, 64);
    const int h = testing::uniform_int(rng, 1, 64);
    const IdImage inst = testing::random_id_image(rng, w, h, 4, 0.8);
    const IdImage sem = testing::random_id_image(rng, w, h, 3, 0.8);
    ASSERT_EQ(edge_map_from_instances(inst, sem), oracle_edges(inst, sem));
  }
}

TEST(EdgeMap, SemanticBoundariesOnlyCountForStuff) {
  IdImage inst(2, 1);
  IdImage sem(2, 1);
  sem.at(0, 0) = 1;
  sem.at(0, 1) = 2;
  EXPECT_EQ(edge_map_from_instances(inst, sem).at(0, 0), 1);
  inst.at(0, 0) = 5;
  inst.at(0, 1) = 5;
  EXPECT_EQ(edge_map_from_instances(inst, sem).at(0, 0), 0);
  EXPECT_THROW(edge_map_from_instances(inst, IdImage(1, 1)), Error);
}

TEST(DontCare, RelabelsMaskedCells) {
  ProjectedFrame f(2, 2);
  for (auto& s : f.semantic.pixels()) s = 26;
  f.occlusion_mask.at(1, 0) = 1;
  const ProjectedFrame out = apply_dont_care(f, 0);
  EXPECT_EQ(out.semantic.at(1, 0), 0);
  EXPECT_EQ(out.semantic.at(0, 0), 26);
}

}  // namespace
}  // namespace lidarsim
