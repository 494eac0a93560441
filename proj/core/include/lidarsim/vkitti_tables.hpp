#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lidarsim/calibration.hpp"

namespace lidarsim::vkitti {

/// Whitespace-separated text table whose first non-empty line names the columns.
class Table {
 public:
  static Table parse(std::string_view text);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t row_count() const noexcept { return rows_.size(); }

  std::optional<std::size_t> find_column(std::string_view name) const;
  /// Throws MissingFieldError when the column is absent.
  std::size_t column(std::string_view name) const;

  const std::string& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  /// Throws LineParseError (line numbers count the header as line 1).
  double number(std::size_t row, std::size_t col) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> line_numbers_;
};

/// One annotated object joined from the bbox, pose and (optional) info tables.
///
/// Required columns, by VKITTI 2 names:
///   bbox:  frame trackID left right top bottom truncation_ratio occupancy_ratio
///   pose:  frame trackID width height length camera_space_X camera_space_Y
///          camera_space_Z rotation_camera_y
///   info:  trackID label
/// `cameraID` is honored where present; `alpha` in pose is optional.
struct Object {
  int frame = 0;
  int track_id = 0;
  std::string label = "Car";
  double truncation = 0.0;
  /// 1 - occupancy_ratio.
  double occlusion_fraction = 0.0;
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;
  double height = 0.0;
  double width = 0.0;
  double length = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double rotation_y = 0.0;
  double alpha = 0.0;
};

/// Objects of one camera, sorted by (frame, track id). Rows of bbox without a
/// matching pose row are dropped.
std::vector<Object> join_objects(const Table& bbox, const Table& pose, const Table* info,
                                 int camera_id);

/// Intrinsics row for (frame, camera). Columns: frame cameraID K[0,0] K[1,1] K[0,2] K[1,2].
CameraIntrinsics intrinsics_for(const Table& intrinsic, int frame, int camera_id);

/// World-to-camera 4x4 transform for (frame, camera). Columns: frame cameraID
/// followed by the 16 row-major matrix entries.
Eigen::Matrix4d extrinsic_for(const Table& extrinsic, int frame, int camera_id);

}  // namespace lidarsim::vkitti
