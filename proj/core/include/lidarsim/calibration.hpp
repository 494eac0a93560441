#pragma once

#include <Eigen/Core>

namespace lidarsim {

using Matrix34 = Eigen::Matrix<double, 3, 4>;

/// Pinhole intrinsics in pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// Camera/LiDAR calibration in the KITTI object-benchmark layout.
///
/// A LiDAR point p maps to pixel coordinates through
///   [u*w, v*w, w]^T = cam_projection * [rectification * lidar_to_cam * [p;1]; 1]
/// The camera frame is z-forward, x-right, y-down; the LiDAR frame is
/// x-forward, y-left, z-up.
struct CalibrationSet {
  /// Rectified camera projection ("P2").
  Matrix34 cam_projection = Matrix34::Zero();
  /// Rectifying rotation ("R0_rect").
  Eigen::Matrix3d rectification = Eigen::Matrix3d::Identity();
  /// Rigid LiDAR-to-camera transform ("Tr_velo_to_cam").
  Matrix34 lidar_to_cam = Matrix34::Zero();

  /// Focal length 1, principal point 0, identity rectification and a
  /// lidar_to_cam that only permutes LiDAR axes into camera axes.
  static CalibrationSet identity_chain();

  /// Throws kValidation when rectification is not orthonormal within 1e-4
  /// or the focal entries are not positive.
  void validate() const;

  friend bool operator==(const CalibrationSet&, const CalibrationSet&) = default;
};

/// Rotation taking LiDAR axes (x fwd, y left, z up) to camera axes
/// (x right, y down, z fwd).
Eigen::Matrix3d lidar_to_camera_axes();

/// 4x4 homogeneous form of a 3x4 rigid transform.
Eigen::Matrix4d to_homogeneous(const Matrix34& transform);

/// Homogeneous transform taking LiDAR coordinates to rectified camera coordinates.
Eigen::Matrix4d lidar_to_rectified(const CalibrationSet& calib);

}  // namespace lidarsim
