#include "lidarsim/reprojection.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "lidarsim/error.hpp"

namespace lidarsim {

CameraModel::CameraModel(const CalibrationSet& calib)
    : projection_(calib.cam_projection),
      lidar_to_rect_(lidar_to_rectified(calib)),
      rect_to_lidar_(lidar_to_rect_.inverse()) {}

Eigen::Vector3d CameraModel::backproject(double u, double v, double depth) const {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw Error(ErrorCode::kInvalidDepth, "depth must be positive and finite");
  }
  // Unknowns (X, Y, w) of P * [X Y depth 1]^T = w * [u v 1]^T.
  Eigen::Matrix3d a;
  // clang-format off
  a << projection_(0, 0), projection_(0, 1), -u,
       projection_(1, 0), projection_(1, 1), -v,
       projection_(2, 0), projection_(2, 1), -1.0;
  // clang-format on
  const Eigen::Vector3d b = -(projection_.col(2) * depth + projection_.col(3));
  const Eigen::Vector3d xyw = a.partialPivLu().solve(b);
  const Eigen::Vector4d rect(xyw.x(), xyw.y(), depth, 1.0);
  return (rect_to_lidar_ * rect).head<3>();
}

bool CameraModel::try_project(const Eigen::Vector3d& lidar_point, PixelProjection& out) const {
  const Eigen::Vector4d rect = lidar_to_rect_ * lidar_point.homogeneous();
  if (!(rect.z() > 0.0)) return false;
  const Eigen::Vector3d image = projection_ * rect;
  if (!(image.z() > 0.0)) return false;
  out.u = image.x() / image.z();
  out.v = image.y() / image.z();
  out.depth = rect.z();
  return true;
}

PixelProjection CameraModel::project(const Eigen::Vector3d& lidar_point) const {
  PixelProjection out;
  if (!try_project(lidar_point, out)) {
    throw Error(ErrorCode::kBehindCamera, "point lies behind the camera");
  }
  return out;
}

Eigen::Vector3d backproject_pixel(double u, double v, double depth, const CalibrationSet& calib) {
  if (!(depth > 0.0)) throw Error(ErrorCode::kInvalidDepth, "depth must be positive");
  return CameraModel(calib).backproject(u, v, depth);
}

PixelProjection project_lidar_to_camera(const Eigen::Vector3d& point,
                                        const CalibrationSet& calib) {
  return CameraModel(calib).project(point);
}

void CameraFrame::validate() const {
  if (!rgb.empty()) require_same_shape(rgb, depth, "camera frame rgb");
  if (!semantic.empty()) require_same_shape(semantic, depth, "camera frame semantic");
  if (!instance.empty()) require_same_shape(instance, depth, "camera frame instance");
}

namespace {

// Nearest table row whose half-spacing window contains the elevation, or -1.
class RowBinner {
 public:
  explicit RowBinner(std::vector<double> table) : table_(std::move(table)) {
    half_.resize(table_.size(), std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < table_.size(); ++r) {
      double gap = std::numeric_limits<double>::infinity();
      if (r > 0) gap = std::min(gap, std::abs(table_[r] - table_[r - 1]));
      if (r + 1 < table_.size()) gap = std::min(gap, std::abs(table_[r] - table_[r + 1]));
      half_[r] = 0.5 * gap;
    }
  }

  int row_for(double elevation) const {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < table_.size(); ++r) {
      const double d = std::abs(elevation - table_[r]);
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(r);
      }
    }
    if (best < 0 || best_dist > half_[static_cast<std::size_t>(best)]) return -1;
    return best;
  }

 private:
  std::vector<double> table_;
  std::vector<double> half_;
};

}  // namespace

ProjectedFrame project_camera_to_lidar_grid(const CameraFrame& frame, const CalibrationSet& calib,
                                            const PolarGridConfig& cfg,
                                            const ProjectionOptions& options) {
  cfg.validate();
  frame.validate();
  std::vector<double> table = options.elevation_table.empty()
                                  ? default_elevation_table(cfg.num_rows)
                                  : options.elevation_table;
  if (table.size() != static_cast<std::size_t>(cfg.num_rows)) {
    throw Error(ErrorCode::kShape, "elevation table must have one entry per grid row");
  }
  const RowBinner binner(std::move(table));
  const CameraModel camera(calib);

  const int rows = cfg.crop_rows;
  const int cols = cfg.crop_cols;
  ProjectedFrame out(rows, cols);
  const auto cells = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  std::vector<double> min_range(cells, std::numeric_limits<double>::infinity());
  std::vector<double> max_range(cells, -std::numeric_limits<double>::infinity());
  std::vector<int> contributors(cells, 0);

  for (int v = 0; v < frame.height(); ++v) {
    for (int u = 0; u < frame.width(); ++u) {
      const float d = frame.depth.at(v, u);
      if (!(d > 0.0F)) continue;
      const Eigen::Vector3d p =
          camera.backproject(u + frame.origin_u, v + frame.origin_v, static_cast<double>(d));
      const double range = p.norm();
      const double azimuth = std::atan2(p.y(), p.x());
      const double elevation = std::atan2(p.z(), std::hypot(p.x(), p.y()));
      const int full_row = binner.row_for(elevation);
      if (full_row < 0) continue;
      const int r = full_row - cfg.crop_row_offset;
      const int c = cfg.column_for(azimuth) - cfg.crop_col_offset;
      if (r < 0 || r >= rows || c < 0 || c >= cols) continue;

      const std::size_t cell = static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                               static_cast<std::size_t>(c);
      ++contributors[cell];
      max_range[cell] = std::max(max_range[cell], range);
      if (range < min_range[cell]) {
        min_range[cell] = range;
        out.depth.at(r, c) = d;
        if (!frame.rgb.empty()) out.rgb.at(r, c) = frame.rgb.at(v, u);
        if (!frame.semantic.empty()) out.semantic.at(r, c) = frame.semantic.at(v, u);
        if (!frame.instance.empty()) out.instance.at(r, c) = frame.instance.at(v, u);
      }
    }
  }

  bool any = false;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t cell = static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                               static_cast<std::size_t>(c);
      if (contributors[cell] == 0) continue;
      any = true;
      out.coverage.at(r, c) = 1;
      if (contributors[cell] >= 2 && max_range[cell] - min_range[cell] > options.occlusion_gap) {
        out.occlusion_mask.at(r, c) = 1;
      }
    }
  }
  if (!any) {
    throw Error(ErrorCode::kEmptyProjection, "no valid depth pixel lands in the grid window");
  }
  return out;
}

ProjectedFrame apply_dont_care(const ProjectedFrame& projected, std::int32_t dont_care_class) {
  ProjectedFrame out = projected;
  for (std::size_t i = 0; i < out.occlusion_mask.size(); ++i) {
    if (out.occlusion_mask.pixels()[i] != 0) out.semantic.pixels()[i] = dont_care_class;
  }
  return out;
}

MaskImage edge_map_from_instances(const IdImage& instance, const IdImage& semantic) {
  require_same_shape(instance, semantic, "edge map");
  MaskImage edges(instance.width(), instance.height());
  const auto differs = [&](int r0, int c0, int r1, int c1) {
    const auto i0 = instance.at(r0, c0);
    const auto i1 = instance.at(r1, c1);
    if (i0 != i1) return true;
    return i0 == 0 && semantic.at(r0, c0) != semantic.at(r1, c1);
  };
  for (int r = 0; r < instance.height(); ++r) {
    for (int c = 0; c < instance.width(); ++c) {
      if (c + 1 < instance.width() && differs(r, c, r, c + 1)) {
        edges.at(r, c) = 1;
        edges.at(r, c + 1) = 1;
      }
      if (r + 1 < instance.height() && differs(r, c, r + 1, c)) {
        edges.at(r, c) = 1;
        edges.at(r + 1, c) = 1;
      }
    }
  }
  return edges;
}

MaskImage dilate_square(const MaskImage& mask, int radius) {
  if (radius < 0) throw Error(ErrorCode::kConfig, "dilation radius must be non-negative");
  if (radius == 0 || mask.empty()) return mask;
  const int w = mask.width();
  const int h = mask.height();
  MaskImage horizontal(w, h);
  for (int r = 0; r < h; ++r) {
    int last_set = std::numeric_limits<int>::min() / 2;
    // Forward pass records distance to the nearest set pixel on the left,
    // backward pass to the right.
    for (int c = 0; c < w; ++c) {
      if (mask.at(r, c) != 0) last_set = c;
      if (c - last_set <= radius) horizontal.at(r, c) = 1;
    }
    last_set = std::numeric_limits<int>::max() / 2;
    for (int c = w - 1; c >= 0; --c) {
      if (mask.at(r, c) != 0) last_set = c;
      if (last_set - c <= radius) horizontal.at(r, c) = 1;
    }
  }
  MaskImage out(w, h);
  for (int c = 0; c < w; ++c) {
    int last_set = std::numeric_limits<int>::min() / 2;
    for (int r = 0; r < h; ++r) {
      if (horizontal.at(r, c) != 0) last_set = r;
      if (r - last_set <= radius) out.at(r, c) = 1;
    }
    last_set = std::numeric_limits<int>::max() / 2;
    for (int r = h - 1; r >= 0; --r) {
      if (horizontal.at(r, c) != 0) last_set = r;
      if (last_set - r <= radius) out.at(r, c) = 1;
    }
  }
  return out;
}

ProjectedFrame mask_occlusions_generously(const ProjectedFrame& projected, int dilation_radius) {
  ProjectedFrame out = projected;
  out.occlusion_mask = dilate_square(projected.occlusion_mask, dilation_radius);
  return out;
}

}  // namespace lidarsim
