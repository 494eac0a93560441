#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <random>

#include "lidarsim/cloud_synthesis.hpp"
#include "lidarsim/kitti_io.hpp"
#include "lidarsim/metrics.hpp"
#include "lidarsim/polar_grid.hpp"
#include "lidarsim/reprojection.hpp"

namespace {

using namespace lidarsim;

// 64 lines x full_cols points in sensor sweep order.
PointCloud make_sweep(const PolarGridConfig& cfg) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> range(2.0, 80.0);
  const auto table = default_elevation_table(cfg.num_rows);
  PointCloud cloud;
  for (int line = 0; line < cfg.num_rows; ++line) {
    for (int col = 0; col < cfg.full_cols; ++col) {
      const double az = std::numbers::pi - (col + 0.5) * cfg.column_width();
      const double el = table[static_cast<std::size_t>(line)];
      const double r = range(rng);
      cloud.points.push_back(Point{static_cast<float>(r * std::cos(el) * std::cos(az)),
                                   static_cast<float>(r * std::cos(el) * std::sin(az)),
                                   static_cast<float>(r * std::sin(el)), 0.5F});
    }
  }
  return cloud;
}

CalibrationSet bench_calibration() {
  CalibrationSet calib;
  calib.cam_projection << 721.5, 0, 609.6, 44.9, 0, 721.5, 172.9, 0.2, 0, 0, 1, 0.003;
  calib.rectification.setIdentity();
  calib.lidar_to_cam << 0, -1, 0, 0, 0, 0, -1, -0.08, 1, 0, 0, -0.27;
  return calib;
}

void BM_VelodyneParse(benchmark::State& state) {
  const auto bytes = kitti::write_velodyne_bin(make_sweep(PolarGridConfig{}));
  for (auto _ : state) benchmark::DoNotOptimize(kitti::parse_velodyne_bin(bytes));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_VelodyneParse);

void BM_RowsAndRasterize(benchmark::State& state) {
  const PolarGridConfig cfg;
  const PointCloud cloud = make_sweep(cfg);
  for (auto _ : state) {
    const RowAssignment rows = assign_rows(cloud, cfg);
    benchmark::DoNotOptimize(crop_to_camera_overlap(rasterize_polar(cloud, rows, cfg), cfg));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * cloud.size()));
}
BENCHMARK(BM_RowsAndRasterize);

void BM_ProjectCameraToGrid(benchmark::State& state) {
  const PolarGridConfig cfg;
  CameraFrame frame;
  frame.origin_u = 13;
  frame.origin_v = 23;
  frame.depth = DepthImage(1216, 352, 20.0F);
  frame.semantic = IdImage(1216, 352, 7);
  frame.instance = IdImage(1216, 352, 0);
  const CalibrationSet calib = bench_calibration();
  for (auto _ : state) benchmark::DoNotOptimize(project_camera_to_lidar_grid(frame, calib, cfg));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * frame.depth.size()));
}
BENCHMARK(BM_ProjectCameraToGrid)->Unit(benchmark::kMillisecond);

void BM_Sparsify64To32(benchmark::State& state) {
  const PolarGridConfig cfg;
  const PointCloud cloud = make_sweep(cfg);
  const SparsifyConfig sparsify = SparsifyConfig::from_grid(cfg, 32);
  for (auto _ : state) benchmark::DoNotOptimize(sparsify_to_lines(cloud, sparsify));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * cloud.size()));
}
BENCHMARK(BM_Sparsify64To32);

void BM_Frechet(benchmark::State& state) {
  const auto dim = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  auto summary = [&] {
    Eigen::MatrixXd a(dim, dim);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = n(rng);
    GaussianSummary g;
    g.mean = Eigen::VectorXd::NullaryExpr(dim, [&] { return n(rng); });
    g.covariance = a * a.transpose() / static_cast<double>(dim);
    return g;
  };
  const GaussianSummary a = summary();
  const GaussianSummary b = summary();
  for (auto _ : state) benchmark::DoNotOptimize(frechet_distance(a, b));
}
BENCHMARK(BM_Frechet)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
