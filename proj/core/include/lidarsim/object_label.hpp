#pragma once

#include <string>

namespace lidarsim {

/// One line of a KITTI object label file.
struct ObjectLabel {
  std::string class_name;
  double truncation = 0.0;
  /// 0 fully visible, 1 partly occluded, 2 largely occluded, 3 unknown.
  int occlusion = 0;
  double alpha = 0.0;
  double bbox_left = 0.0;
  double bbox_top = 0.0;
  double bbox_right = 0.0;
  double bbox_bottom = 0.0;
  double height = 0.0;
  double width = 0.0;
  double length = 0.0;
  /// Bottom-center of the box in camera coordinates.
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double rotation_y = 0.0;

  double bbox_height() const noexcept { return bbox_bottom - bbox_top; }
  bool is_dont_care() const noexcept { return class_name == "DontCare"; }
  /// bbox ordered and box dimensions positive. DontCare entries never are.
  bool is_valid() const noexcept {
    return bbox_left < bbox_right && bbox_top < bbox_bottom && height > 0.0 && width > 0.0 &&
           length > 0.0;
  }

  friend bool operator==(const ObjectLabel&, const ObjectLabel&) = default;
};

}  // namespace lidarsim
