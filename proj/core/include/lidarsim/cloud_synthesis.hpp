#pragma once

#include <cstdint>
#include <numbers>

#include "lidarsim/calibration.hpp"
#include "lidarsim/image.hpp"
#include "lidarsim/point_cloud.hpp"
#include "lidarsim/polar_grid.hpp"

namespace lidarsim {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;

enum class KeepPolicy { kNearestToBinCenter };

/// Target beam layout for sparsification. Lines are equal-width elevation
/// bins over [elevation_min, elevation_max]; line 0 is the top bin.
struct SparsifyConfig {
  int n_lines = 64;
  double elevation_min = -24.8 * kDegToRad;
  double elevation_max = 2.0 * kDegToRad;
  KeepPolicy keep_policy = KeepPolicy::kNearestToBinCenter;
  /// Azimuth quantization, shared with the polar grid.
  int full_cols = PolarGridConfig::kDefaultFullCols;
  double azimuth_zero = PolarGridConfig::kDefaultAzimuthZero;

  static SparsifyConfig from_grid(const PolarGridConfig& grid, int n_lines);

  /// Throws kConfig unless 1 <= n_lines <= 128 and elevation_min < elevation_max.
  void validate() const;
  double bin_width() const noexcept { return (elevation_max - elevation_min) / n_lines; }
  /// Line of an elevation, or -1 outside [elevation_min, elevation_max].
  int line_for(double elevation) const noexcept;
  double line_center(int line) const noexcept;
  int column_for(double azimuth) const noexcept;
};

/// Elevation atan2(z, hypot(x, y)) of a point, radians.
double elevation_of(const Point& p) noexcept;

/// Pseudo-LiDAR conversion: every valid pixel becomes a LiDAR-frame point
/// with intensity 0, in row-major pixel order. (origin_u, origin_v) is the
/// position of the depth image inside the calibrated camera image.
/// Throws kEmptyCloud when no pixel is valid.
PointCloud depth_to_cloud(const DepthImage& depth, const CalibrationSet& calib, int origin_u = 0,
                          int origin_v = 0);

/// Where the upscaled intensity map sits inside the full camera image.
/// Defaults are the bottom-centered 1216x352 crop of a 1242x375 frame.
struct IntensityPlacement {
  int target_width = 1216;
  int target_height = 352;
  int origin_u = 13;
  int origin_v = 23;
};

/// Nearest-neighbor upscale of `intensity` to the placement's size. Each
/// point takes the value at its projected pixel; points outside the
/// placement (or behind the camera) get 0.
PointCloud assign_intensity(const PointCloud& cloud, const IntensityImage& intensity,
                            const IntensityPlacement& placement, const CalibrationSet& calib);

struct DropOptions {
  float threshold = 0.0F;
  double drop_probability = 1.0;
  std::uint64_t seed = 0;
};

/// Removes points with intensity <= threshold, each with drop_probability.
/// Survivors keep their order. Probability 1 draws no random numbers.
PointCloud drop_zero_intensity(const PointCloud& cloud, const DropOptions& options = {});

/// Bins points into cfg.n_lines elevation lines and cfg.full_cols azimuth
/// columns, keeping the point closest to its line center per cell (ties:
/// lower input index). Output is line-major, columns ascending.
LineTaggedCloud sparsify_to_lines(const PointCloud& cloud, const SparsifyConfig& cfg);

}  // namespace lidarsim
