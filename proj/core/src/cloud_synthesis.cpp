#include "lidarsim/cloud_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "lidarsim/error.hpp"
#include "lidarsim/reprojection.hpp"

namespace lidarsim {

SparsifyConfig SparsifyConfig::from_grid(const PolarGridConfig& grid, int n_lines) {
  SparsifyConfig cfg;
  cfg.n_lines = n_lines;
  cfg.full_cols = grid.full_cols;
  cfg.azimuth_zero = grid.azimuth_zero;
  return cfg;
}

void SparsifyConfig::validate() const {
  if (n_lines < 1 || n_lines > 128) {
    throw Error(ErrorCode::kConfig, "n_lines must lie in [1, 128]");
  }
  if (!(elevation_min < elevation_max)) {
    throw Error(ErrorCode::kConfig, "elevation_min must be below elevation_max");
  }
  if (full_cols < 1) throw Error(ErrorCode::kConfig, "full_cols must be at least 1");
}

int SparsifyConfig::line_for(double elevation) const noexcept {
  if (!(elevation >= elevation_min && elevation <= elevation_max)) return -1;
  const int bin = std::min(static_cast<int>(std::floor((elevation - elevation_min) / bin_width())),
                           n_lines - 1);
  return n_lines - 1 - bin;
}

double SparsifyConfig::line_center(int line) const noexcept {
  return elevation_max - (line + 0.5) * bin_width();
}

int SparsifyConfig::column_for(double azimuth) const noexcept {
  PolarGridConfig grid;
  grid.full_cols = full_cols;
  grid.azimuth_zero = azimuth_zero;
  return grid.column_for(azimuth);
}

double elevation_of(const Point& p) noexcept {
  return std::atan2(static_cast<double>(p.z),
                    std::hypot(static_cast<double>(p.x), static_cast<double>(p.y)));
}

PointCloud depth_to_cloud(const DepthImage& depth, const CalibrationSet& calib, int origin_u,
                          int origin_v) {
  const CameraModel camera(calib);
  PointCloud cloud;
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const float d = depth.at(v, u);
      if (!(d > 0.0F) || !std::isfinite(d)) continue;
      const Eigen::Vector3d p = camera.backproject(u + origin_u, v + origin_v, d);
      cloud.points.push_back(
          Point{static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z()), 0.0F});
    }
  }
  if (cloud.empty()) throw Error(ErrorCode::kEmptyCloud, "depth map has no valid pixel");
  return cloud;
}

PointCloud assign_intensity(const PointCloud& cloud, const IntensityImage& intensity,
                            const IntensityPlacement& placement, const CalibrationSet& calib) {
  if (placement.target_width <= 0 || placement.target_height <= 0) {
    throw Error(ErrorCode::kConfig, "intensity placement must be non-empty");
  }
  const CameraModel camera(calib);
  PointCloud out = cloud;
  const long long src_w = intensity.width();
  const long long src_h = intensity.height();
  for (Point& p : out.points) {
    p.intensity = 0.0F;
    if (intensity.empty()) continue;
    PixelProjection px;
    if (!camera.try_project(Eigen::Vector3d(p.x, p.y, p.z), px)) continue;
    // Grazing points can project absurdly far out; keep llround defined.
    if (!(std::abs(px.u) < 1e9 && std::abs(px.v) < 1e9)) continue;
    const long long tu = std::llround(px.u) - placement.origin_u;
    const long long tv = std::llround(px.v) - placement.origin_v;
    if (tu < 0 || tv < 0 || tu >= placement.target_width || tv >= placement.target_height) {
      continue;
    }
    // Nearest-neighbor upscale: target pixel t reads source floor(t * src / target).
    const auto sc = static_cast<int>(tu * src_w / placement.target_width);
    const auto sr = static_cast<int>(tv * src_h / placement.target_height);
    p.intensity = std::clamp(intensity.at(sr, sc), 0.0F, 1.0F);
  }
  return out;
}

PointCloud drop_zero_intensity(const PointCloud& cloud, const DropOptions& options) {
  if (options.drop_probability < 0.0 || options.drop_probability > 1.0) {
    throw Error(ErrorCode::kConfig, "drop_probability must lie in [0, 1]");
  }
  const bool always = options.drop_probability >= 1.0;
  std::mt19937_64 rng(options.seed);
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Point& p : cloud.points) {
    if (p.intensity <= options.threshold) {
      if (always) continue;
      // 53 random bits -> uniform double in [0, 1); identical on every platform.
      const double draw = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (draw < options.drop_probability) continue;
    }
    out.points.push_back(p);
  }
  return out;
}

LineTaggedCloud sparsify_to_lines(const PointCloud& cloud, const SparsifyConfig& cfg) {
  cfg.validate();
  struct Best {
    std::size_t index;
    double distance;
  };
  std::unordered_map<std::uint64_t, Best> cells;
  cells.reserve(cloud.size() / 4 + 1);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    const double elevation = elevation_of(p);
    const int line = cfg.line_for(elevation);
    if (line < 0) continue;
    const int col = cfg.column_for(std::atan2(static_cast<double>(p.y), static_cast<double>(p.x)));
    const std::uint64_t key = static_cast<std::uint64_t>(line) * static_cast<std::uint64_t>(cfg.full_cols) +
                              static_cast<std::uint64_t>(col);
    const double distance = std::abs(elevation - cfg.line_center(line));
    const auto [it, inserted] = cells.try_emplace(key, Best{i, distance});
    if (!inserted && distance < it->second.distance) it->second = Best{i, distance};
  }
  std::vector<std::pair<std::uint64_t, std::size_t>> kept;
  kept.reserve(cells.size());
  for (const auto& [key, best] : cells) kept.emplace_back(key, best.index);
  std::sort(kept.begin(), kept.end());

  LineTaggedCloud out;
  out.cloud.points.reserve(kept.size());
  out.line.reserve(kept.size());
  for (const auto& [key, index] : kept) {
    out.cloud.points.push_back(cloud.points[index]);
    out.line.push_back(static_cast<int>(key / static_cast<std::uint64_t>(cfg.full_cols)));
  }
  return out;
}

}  // namespace lidarsim
