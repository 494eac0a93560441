#include "lidarsim/polar_grid.hpp"

#include <algorithm>
#include <cmath>

#include "lidarsim/error.hpp"

namespace lidarsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_azimuth(double azimuth) {
  // atan2 returns (-pi, pi]; fold pi onto -pi.
  return azimuth >= std::numbers::pi ? azimuth - kTwoPi : azimuth;
}

}  // namespace

void PolarGridConfig::validate() const {
  if (num_rows < 1 || full_cols < 1) {
    throw Error(ErrorCode::kConfig, "num_rows and full_cols must be at least 1");
  }
  if (crop_rows < 1 || crop_cols < 1 || crop_rows > num_rows || crop_cols > full_cols) {
    throw Error(ErrorCode::kConfig, "crop window must be non-empty and no larger than the grid");
  }
  if (crop_row_offset < 0 || crop_col_offset < 0) {
    throw Error(ErrorCode::kConfig, "crop offsets must be non-negative");
  }
  if (!std::isfinite(azimuth_zero)) {
    throw Error(ErrorCode::kConfig, "azimuth_zero must be finite");
  }
}

int PolarGridConfig::column_for(double azimuth) const noexcept {
  double turned = std::fmod(azimuth_zero - azimuth, kTwoPi);
  if (turned < 0.0) turned += kTwoPi;
  const int col = static_cast<int>(std::floor(turned / kTwoPi * full_cols));
  return std::clamp(col, 0, full_cols - 1);
}

double PolarGridConfig::column_center(int col) const noexcept {
  return azimuth_zero - (col + 0.5) * column_width();
}

std::vector<double> default_elevation_table(int num_rows) {
  constexpr double kTop = 2.0 * std::numbers::pi / 180.0;
  constexpr double kBottom = -24.8 * std::numbers::pi / 180.0;
  std::vector<double> table(static_cast<std::size_t>(std::max(num_rows, 0)));
  for (int r = 0; r < num_rows; ++r) {
    table[static_cast<std::size_t>(r)] =
        num_rows == 1 ? kTop : kTop + (kBottom - kTop) * r / (num_rows - 1);
  }
  return table;
}

std::vector<double> crop_elevation_table(std::span<const double> full_table,
                                         const PolarGridConfig& cfg) {
  const auto first = static_cast<std::size_t>(cfg.crop_row_offset);
  const auto count = static_cast<std::size_t>(cfg.crop_rows);
  if (first + count > full_table.size()) {
    throw Error(ErrorCode::kBounds, "elevation table shorter than the crop window");
  }
  return {full_table.begin() + static_cast<std::ptrdiff_t>(first),
          full_table.begin() + static_cast<std::ptrdiff_t>(first + count)};
}

std::size_t PolarGridImage::valid_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(valid.pixels().begin(), valid.pixels().end(), [](auto v) { return v != 0; }));
}

RowAssignment assign_rows(const PointCloud& cloud, const PolarGridConfig& cfg) {
  cfg.validate();
  RowAssignment out;
  out.row.resize(cloud.size());
  out.azimuth.resize(cloud.size());
  int row = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    const double azimuth =
        wrap_azimuth(std::atan2(static_cast<double>(p.y), static_cast<double>(p.x)));
    if (i > 0 && std::abs(azimuth - out.azimuth[i - 1]) > std::numbers::pi) ++row;
    out.row[i] = row;
    out.azimuth[i] = azimuth;
  }
  const auto lines = cloud.empty() ? std::size_t{0} : static_cast<std::size_t>(row) + 1;
  if (lines > static_cast<std::size_t>(cfg.num_rows)) {
    throw RowOverflowError(lines, static_cast<std::size_t>(cfg.num_rows));
  }
  return out;
}

PolarGridImage rasterize_polar(const PointCloud& cloud, const RowAssignment& rows,
                               const PolarGridConfig& cfg) {
  cfg.validate();
  if (rows.row.size() != cloud.size() || rows.azimuth.size() != cloud.size()) {
    throw Error(ErrorCode::kShape, "row assignment does not match the cloud length");
  }
  PolarGridImage grid(cfg.num_rows, cfg.full_cols);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const int row = rows.row[i];
    if (row < 0 || row >= cfg.num_rows) {
      throw Error(ErrorCode::kBounds, "row index outside the grid");
    }
    const int col = cfg.column_for(rows.azimuth[i]);
    const Point& p = cloud.points[i];
    const auto range = static_cast<float>(std::sqrt(static_cast<double>(p.x) * p.x +
                                                    static_cast<double>(p.y) * p.y +
                                                    static_cast<double>(p.z) * p.z));
    if (grid.valid.at(row, col) != 0 && grid.depth.at(row, col) <= range) continue;
    grid.valid.at(row, col) = 1;
    grid.depth.at(row, col) = range;
    grid.intensity.at(row, col) = p.intensity;
  }
  return grid;
}

PolarGridImage crop_to_camera_overlap(const PolarGridImage& grid, const PolarGridConfig& cfg) {
  if (cfg.crop_rows < 0 || cfg.crop_cols < 0 || cfg.crop_row_offset < 0 ||
      cfg.crop_col_offset < 0 || cfg.crop_row_offset + cfg.crop_rows > grid.rows() ||
      cfg.crop_col_offset + cfg.crop_cols > grid.cols()) {
    throw Error(ErrorCode::kBounds, "crop window exceeds the grid");
  }
  PolarGridImage out(cfg.crop_rows, cfg.crop_cols);
  out.row_offset = grid.row_offset + cfg.crop_row_offset;
  out.col_offset = grid.col_offset + cfg.crop_col_offset;
  for (int r = 0; r < cfg.crop_rows; ++r) {
    for (int c = 0; c < cfg.crop_cols; ++c) {
      const int sr = r + cfg.crop_row_offset;
      const int sc = c + cfg.crop_col_offset;
      out.intensity.at(r, c) = grid.intensity.at(sr, sc);
      out.depth.at(r, c) = grid.depth.at(sr, sc);
      out.valid.at(r, c) = grid.valid.at(sr, sc);
    }
  }
  return out;
}

PointCloud grid_to_cloud(const PolarGridImage& grid, const PolarGridConfig& cfg,
                         std::span<const double> elevation_table) {
  if (elevation_table.size() != static_cast<std::size_t>(grid.rows())) {
    throw Error(ErrorCode::kShape, "elevation table length must equal the grid row count");
  }
  PointCloud cloud;
  for (int r = 0; r < grid.rows(); ++r) {
    const double elevation = elevation_table[static_cast<std::size_t>(r)];
    const double cos_el = std::cos(elevation);
    const double sin_el = std::sin(elevation);
    for (int c = 0; c < grid.cols(); ++c) {
      if (grid.valid.at(r, c) == 0) continue;
      const double azimuth = cfg.column_center(c + grid.col_offset);
      const double range = grid.depth.at(r, c);
      cloud.points.push_back(Point{static_cast<float>(range * cos_el * std::cos(azimuth)),
                                   static_cast<float>(range * cos_el * std::sin(azimuth)),
                                   static_cast<float>(range * sin_el),
                                   grid.intensity.at(r, c)});
    }
  }
  return cloud;
}

PolarGridImage denoise_grid(const PolarGridImage& grid, DenoiseMethod method) {
  if (method == DenoiseMethod::kNone) return grid;
  PolarGridImage out = grid;
  float window[9];
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      if (grid.valid.at(r, c) == 0) continue;
      int n = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (grid.valid.contains(rr, cc) && grid.valid.at(rr, cc) != 0) {
            window[n++] = grid.intensity.at(rr, cc);
          }
        }
      }
      std::sort(window, window + n);
      out.intensity.at(r, c) =
          (n % 2 == 1) ? window[n / 2] : 0.5F * (window[n / 2 - 1] + window[n / 2]);
    }
  }
  return out;
}

}  // namespace lidarsim
