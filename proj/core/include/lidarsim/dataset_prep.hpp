#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lidarsim/calibration.hpp"
#include "lidarsim/image.hpp"
#include "lidarsim/object_label.hpp"
#include "lidarsim/point_cloud.hpp"
#include "lidarsim/polar_grid.hpp"
#include "lidarsim/reprojection.hpp"
#include "lidarsim/vkitti_tables.hpp"

namespace lidarsim {

/// Packs an RGB color into the key used for color-coded class maps.
constexpr std::int64_t pack_color(int r, int g, int b) {
  return (static_cast<std::int64_t>(r) << 16) | (static_cast<std::int64_t>(g) << 8) | b;
}

/// Source class value (id or packed color) to KITTI class id.
struct ClassMapping {
  std::map<std::int64_t, std::int32_t> table;
  std::map<std::int64_t, std::string> names;
  std::int32_t dont_care_id = 0;
  /// Target for values missing from the table; nullopt makes them an error.
  std::optional<std::int32_t> default_id;

  /// {"dont_care_id": 0, "default_id": null,
  ///  "entries": [{"name": "Car", "color": [255,127,80], "id": 26},
  ///              {"value": 3, "id": 7}]}
  static ClassMapping from_json(std::string_view text);
  std::string to_json() const;

  /// VKITTI 2 palette onto KITTI (Cityscapes-style) label ids. Unmapped
  /// colors go to the don't-care id unless `strict`.
  static ClassMapping vkitti2_to_kitti(bool strict = false);
};

DepthImage scale_synthetic_depth(const DepthImage& depth, double source_max, double target_max);

/// Throws UnmappedClassError listing every value without an entry when the
/// mapping has no default.
IdImage map_semantic_classes(const IdImage& source, const ClassMapping& mapping);

/// Renumbers distinct non-zero ids 1..K in row-major first-appearance order.
IdImage remap_instances(const IdImage& instance);

/// Drops labels whose camera-frame location is farther than max_distance.
/// Exactly max_distance is kept.
std::vector<ObjectLabel> filter_labels(const std::vector<ObjectLabel>& labels,
                                       double max_distance = 80.0);

enum class Difficulty { kEasy, kModerate, kHard, kIgnored };

std::string_view to_string(Difficulty d);

struct DifficultyLevel {
  double min_bbox_height;
  int max_occlusion;
  double max_truncation;
};

/// Levels are checked easy, moderate, hard; the first satisfied wins.
struct DifficultyRule {
  std::array<DifficultyLevel, 3> levels{{{40.0, 0, 0.15}, {25.0, 1, 0.30}, {25.0, 2, 0.50}}};
  /// Occlusion codes below this are raised to it before classification.
  int min_occlusion_code = 0;

  static DifficultyRule kitti() { return {}; }
  /// No object counts as fully visible, so nothing is ever easy.
  static DifficultyRule vkitti() {
    DifficultyRule rule;
    rule.min_occlusion_code = 1;
    return rule;
  }
  void validate() const;
};

Difficulty assign_difficulty(const ObjectLabel& label, const DifficultyRule& rule);

/// Visible-fraction to KITTI occlusion code: <=0.1 -> 1, <=0.5 -> 2, else 3.
/// Never 0, since synthetic occlusion values never report full visibility.
int occlusion_code_from_fraction(double occlusion_fraction);

ObjectLabel label_from_vkitti(const vkitti::Object& object);

/// Poses are sensor-to-reference rigid transforms with both sensors using
/// LiDAR-style axes (x forward, y left, z up). Throws kDegeneratePose for a
/// non-rigid or singular pose.
CalibrationSet reconstruct_calibration(const CameraIntrinsics& intrinsics,
                                       const Eigen::Matrix4d& camera_pose,
                                       const Eigen::Matrix4d& lidar_pose);

/// Direct resize of camera layers to the crop size: nearest for ids,
/// area-average for rgb and depth. Edges come from the resized ids; the
/// occlusion mask is all zero.
ProjectedFrame downsample_to_grid(const CameraFrame& frame, const PolarGridConfig& cfg);

struct LabeledFrame {
  std::string frame_id;
  std::optional<PointCloud> scan;
  CameraFrame camera;
  std::optional<CalibrationSet> calib;
  std::vector<ObjectLabel> labels;
};

struct TrainingPairOptions {
  PolarGridConfig grid;
  ProjectionOptions projection;
  int dilation_radius = 1;
  std::int32_t dont_care_id = 0;
  DenoiseMethod denoise = DenoiseMethod::kMedian3;
};

struct TrainingPair {
  std::string frame_id;
  ProjectedFrame input;
  PolarGridImage target;
};

/// Target: denoise(crop(rasterize(assign_rows(scan)))).
/// Input: camera layers projected onto the same crop with occlusions dilated,
/// edges from the projected ids, and don't-care applied to the semantics.
/// Failures are rethrown as FrameError carrying the frame id.
TrainingPair build_training_pair(const LabeledFrame& frame, const TrainingPairOptions& options);

}  // namespace lidarsim
