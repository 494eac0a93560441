#pragma once

#include <vector>

#include <Eigen/Core>

#include "lidarsim/calibration.hpp"
#include "lidarsim/image.hpp"
#include "lidarsim/polar_grid.hpp"

namespace lidarsim {

struct PixelProjection {
  double u = 0.0;
  double v = 0.0;
  /// Rectified camera-frame z in meters.
  double depth = 0.0;
};

/// Precomputed forward and inverse camera chain for one calibration.
class CameraModel {
 public:
  explicit CameraModel(const CalibrationSet& calib);

  /// Pixel (u, v) at camera-frame depth `depth` to a LiDAR-frame point.
  /// Throws kInvalidDepth for depth <= 0 or non-finite depth.
  Eigen::Vector3d backproject(double u, double v, double depth) const;
  /// Throws kBehindCamera when the point is not in front of the camera.
  PixelProjection project(const Eigen::Vector3d& lidar_point) const;
  /// Non-throwing variant; false when behind the camera.
  bool try_project(const Eigen::Vector3d& lidar_point, PixelProjection& out) const;

 private:
  Matrix34 projection_;
  Eigen::Matrix4d lidar_to_rect_;
  Eigen::Matrix4d rect_to_lidar_;
};

Eigen::Vector3d backproject_pixel(double u, double v, double depth, const CalibrationSet& calib);
PixelProjection project_lidar_to_camera(const Eigen::Vector3d& point, const CalibrationSet& calib);

/// Aligned camera-perspective layers. Optional layers are left empty.
/// (origin_u, origin_v) is the position of pixel (0, 0) inside the image the
/// calibration refers to, for inputs cropped from the full camera frame.
struct CameraFrame {
  RgbImage rgb;
  DepthImage depth;
  IdImage semantic;
  IdImage instance;
  int origin_u = 0;
  int origin_v = 0;

  int width() const noexcept { return depth.width(); }
  int height() const noexcept { return depth.height(); }
  /// Throws kShape unless every present layer matches the depth layer.
  void validate() const;
};

/// Camera layers expressed on the cropped polar grid.
struct ProjectedFrame {
  RgbImage rgb;
  /// Camera depth of the contributing pixel, meters; 0 where nothing landed.
  DepthImage depth;
  IdImage semantic;
  IdImage instance;
  MaskImage edges;
  /// 1 = occluded / don't care.
  MaskImage occlusion_mask;
  /// 1 where at least one camera pixel landed.
  MaskImage coverage;

  ProjectedFrame() = default;
  ProjectedFrame(int rows, int cols)
      : rgb(cols, rows),
        depth(cols, rows),
        semantic(cols, rows),
        instance(cols, rows),
        edges(cols, rows),
        occlusion_mask(cols, rows),
        coverage(cols, rows) {}

  int rows() const noexcept { return depth.height(); }
  int cols() const noexcept { return depth.width(); }

  friend bool operator==(const ProjectedFrame&, const ProjectedFrame&) = default;
};

struct ProjectionOptions {
  /// Cells whose contributors span more than this range (meters) are occluded.
  double occlusion_gap = 1.0;
  /// Per-row elevation (radians) of the full grid; empty selects
  /// default_elevation_table(cfg.num_rows).
  std::vector<double> elevation_table;
};

/// Back-projects every valid camera pixel, bins it into the cropped polar
/// grid and keeps the nearest contributor per cell (ties: lower pixel index).
/// Throws kEmptyProjection when no pixel lands in the crop window.
ProjectedFrame project_camera_to_lidar_grid(const CameraFrame& frame, const CalibrationSet& calib,
                                            const PolarGridConfig& cfg,
                                            const ProjectionOptions& options = {});

ProjectedFrame apply_dont_care(const ProjectedFrame& projected, std::int32_t dont_care_class);

/// 1 where a 4-neighbor differs in instance id, or, for instance id 0, in
/// semantic class.
MaskImage edge_map_from_instances(const IdImage& instance, const IdImage& semantic);

/// Dilates the occlusion mask with a (2r+1)x(2r+1) square.
ProjectedFrame mask_occlusions_generously(const ProjectedFrame& projected, int dilation_radius);

/// Binary dilation with a square structuring element, clipped at the border.
MaskImage dilate_square(const MaskImage& mask, int radius);

}  // namespace lidarsim
