#include "lidarsim/calibration.hpp"

#include <Eigen/Dense>

#include "lidarsim/error.hpp"

namespace lidarsim {

Eigen::Matrix3d lidar_to_camera_axes() {
  Eigen::Matrix3d axes;
  // clang-format off
  axes <<  0.0, -1.0,  0.0,
           0.0,  0.0, -1.0,
           1.0,  0.0,  0.0;
  // clang-format on
  return axes;
}

CalibrationSet CalibrationSet::identity_chain() {
  CalibrationSet calib;
  calib.cam_projection.setZero();
  calib.cam_projection.leftCols<3>().setIdentity();
  calib.rectification.setIdentity();
  calib.lidar_to_cam.setZero();
  calib.lidar_to_cam.leftCols<3>() = lidar_to_camera_axes();
  return calib;
}

void CalibrationSet::validate() const {
  const Eigen::Matrix3d gram = rectification * rectification.transpose();
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-4) {
    throw Error(ErrorCode::kValidation, "rectification is not orthonormal");
  }
  if (!(cam_projection(0, 0) > 0.0) || !(cam_projection(1, 1) > 0.0)) {
    throw Error(ErrorCode::kValidation, "camera projection focal entries must be positive");
  }
  if (!cam_projection.allFinite() || !lidar_to_cam.allFinite()) {
    throw Error(ErrorCode::kValidation, "calibration contains non-finite entries");
  }
}

Eigen::Matrix4d to_homogeneous(const Matrix34& transform) {
  Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
  h.topRows<3>() = transform;
  return h;
}

Eigen::Matrix4d lidar_to_rectified(const CalibrationSet& calib) {
  Eigen::Matrix4d rect = Eigen::Matrix4d::Identity();
  rect.topLeftCorner<3, 3>() = calib.rectification;
  return rect * to_homogeneous(calib.lidar_to_cam);
}

}  // namespace lidarsim
