#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "lidarsim/image.hpp"
#include "lidarsim/point_cloud.hpp"

namespace lidarsim {

/// Geometry of the polar (laser row x azimuth column) raster.
///
/// Column c of the full panorama covers azimuths
///   (azimuth_zero - (c+1) * 2pi/full_cols, azimuth_zero - c * 2pi/full_cols],
/// i.e. columns advance clockwise seen from above, starting at azimuth_zero.
/// The default azimuth_zero puts the left edge of a centered 372-column
/// window at column 0, so the default crop needs no column offset.
struct PolarGridConfig {
  static constexpr int kDefaultRows = 64;
  static constexpr int kDefaultFullCols = 1674;
  static constexpr int kDefaultCropCols = 372;
  static constexpr int kDefaultCropRows = 44;
  static constexpr double kDefaultAzimuthZero =
      std::numbers::pi * kDefaultCropCols / kDefaultFullCols;

  int num_rows = kDefaultRows;
  int full_cols = kDefaultFullCols;
  int crop_cols = kDefaultCropCols;
  int crop_rows = kDefaultCropRows;
  int crop_col_offset = 0;
  int crop_row_offset = 0;
  double azimuth_zero = kDefaultAzimuthZero;

  /// Throws kConfig on inconsistent sizes.
  void validate() const;

  double column_width() const noexcept { return 2.0 * std::numbers::pi / full_cols; }
  /// Full-panorama column of an azimuth in radians.
  int column_for(double azimuth) const noexcept;
  /// Azimuth of the center of full-panorama column `col`.
  double column_center(int col) const noexcept;
};

/// Nominal HDL-64E spread: +2.0 deg down to -24.8 deg, linear over `num_rows`.
std::vector<double> default_elevation_table(int num_rows = PolarGridConfig::kDefaultRows);

/// Rows [crop_row_offset, crop_row_offset + crop_rows) of a full-height table.
std::vector<double> crop_elevation_table(std::span<const double> full_table,
                                         const PolarGridConfig& cfg);

struct RowAssignment {
  /// Scan line of each point, non-decreasing in file order.
  std::vector<int> row;
  /// atan2(y, x) in [-pi, pi).
  std::vector<double> azimuth;
};

/// Multi-channel polar raster. row_offset/col_offset locate this raster
/// inside the full panorama (both 0 for an uncropped grid).
struct PolarGridImage {
  Image<float> intensity;
  /// Range in meters.
  Image<float> depth;
  MaskImage valid;
  int row_offset = 0;
  int col_offset = 0;

  PolarGridImage() = default;
  PolarGridImage(int rows, int cols)
      : intensity(cols, rows), depth(cols, rows), valid(cols, rows) {}

  int rows() const noexcept { return valid.height(); }
  int cols() const noexcept { return valid.width(); }
  std::size_t valid_count() const noexcept;

  friend bool operator==(const PolarGridImage&, const PolarGridImage&) = default;
};

/// Recovers scan lines from file order: a new line starts whenever the
/// azimuth of consecutive points jumps by more than pi. Throws
/// RowOverflowError when more than cfg.num_rows lines are found.
RowAssignment assign_rows(const PointCloud& cloud, const PolarGridConfig& cfg);

/// Full-panorama raster (num_rows x full_cols). On collisions the nearer
/// point wins; equal ranges keep the earlier point.
PolarGridImage rasterize_polar(const PointCloud& cloud, const RowAssignment& rows,
                               const PolarGridConfig& cfg);

/// Camera-overlap window of a full-panorama grid. Throws kBounds when the
/// configured window does not fit.
PolarGridImage crop_to_camera_overlap(const PolarGridImage& grid, const PolarGridConfig& cfg);

/// One point per valid cell at the cell-center azimuth and the row's
/// elevation. `elevation_table` has one entry (radians) per grid row.
PointCloud grid_to_cloud(const PolarGridImage& grid, const PolarGridConfig& cfg,
                         std::span<const double> elevation_table);

enum class DenoiseMethod { kNone, kMedian3 };

/// kMedian3 replaces each valid intensity with the median of the valid
/// intensities in its 3x3 neighborhood (mean of the two middle values for an
/// even count). The validity mask is never changed.
PolarGridImage denoise_grid(const PolarGridImage& grid, DenoiseMethod method);

}  // namespace lidarsim
