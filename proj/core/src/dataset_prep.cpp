#include "lidarsim/dataset_prep.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include <Eigen/Dense>

#include "json.hpp"
#include "lidarsim/error.hpp"
#include "lidarsim/resample.hpp"

namespace lidarsim {

using nlohmann::json;

namespace {

struct PaletteEntry {
  const char* name;
  int r, g, b;
  std::int32_t id;
};

// Mirrors data/vkitti2_to_kitti.json.
constexpr PaletteEntry kVkitti2Palette[] = {
    {"Terrain", 210, 0, 200, 22},      {"Sky", 90, 200, 255, 23},
    {"Tree", 0, 199, 0, 21},           {"Vegetation", 90, 240, 0, 21},
    {"Building", 140, 140, 140, 11},   {"Road", 100, 60, 100, 7},
    {"GuardRail", 250, 100, 255, 14},  {"TrafficSign", 255, 255, 0, 20},
    {"TrafficLight", 200, 200, 0, 19}, {"Pole", 255, 130, 0, 17},
    {"Misc", 80, 80, 80, 4},           {"Truck", 160, 60, 60, 27},
    {"Car", 255, 127, 80, 26},         {"Van", 0, 139, 139, 26},
    {"Undefined", 0, 0, 0, 0},
};

}  // namespace

ClassMapping ClassMapping::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("class mapping is not valid JSON: ") + e.what());
  }
  ClassMapping mapping;
  try {
    mapping.dont_care_id = doc.at("dont_care_id").get<std::int32_t>();
    if (doc.contains("default_id") && !doc["default_id"].is_null()) {
      mapping.default_id = doc["default_id"].get<std::int32_t>();
    }
    for (const auto& entry : doc.at("entries")) {
      std::int64_t key = 0;
      if (entry.contains("color")) {
        const auto& c = entry["color"];
        if (!c.is_array() || c.size() != 3) {
          throw Error(ErrorCode::kConfig, "class mapping color must be [r, g, b]");
        }
        key = pack_color(c[0].get<int>(), c[1].get<int>(), c[2].get<int>());
      } else {
        key = entry.at("value").get<std::int64_t>();
      }
      mapping.table[key] = entry.at("id").get<std::int32_t>();
      if (entry.contains("name")) mapping.names[key] = entry["name"].get<std::string>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("class mapping: ") + e.what());
  }
  return mapping;
}

std::string ClassMapping::to_json() const {
  json doc;
  doc["dont_care_id"] = dont_care_id;
  doc["default_id"] = default_id ? json(*default_id) : json(nullptr);
  json entries = json::array();
  for (const auto& [key, id] : table) {
    json e;
    e["value"] = key;
    e["id"] = id;
    if (const auto it = names.find(key); it != names.end()) e["name"] = it->second;
    entries.push_back(std::move(e));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(2);
}

ClassMapping ClassMapping::vkitti2_to_kitti(bool strict) {
  ClassMapping mapping;
  mapping.dont_care_id = 0;
  for (const auto& e : kVkitti2Palette) {
    const auto key = pack_color(e.r, e.g, e.b);
    mapping.table[key] = e.id;
    mapping.names[key] = e.name;
  }
  if (!strict) mapping.default_id = mapping.dont_care_id;
  return mapping;
}

DepthImage scale_synthetic_depth(const DepthImage& depth, double source_max, double target_max) {
  if (!(source_max > 0.0) || !(target_max > 0.0)) {
    throw Error(ErrorCode::kConfig, "depth scaling ranges must be positive");
  }
  DepthImage out(depth.width(), depth.height());
  const double factor = target_max / source_max;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const float d = depth.pixels()[i];
    if (!(d > 0.0F)) continue;
    out.pixels()[i] = static_cast<float>(std::min(static_cast<double>(d), source_max) * factor);
  }
  return out;
}

IdImage map_semantic_classes(const IdImage& source, const ClassMapping& mapping) {
  IdImage out(source.width(), source.height());
  std::set<std::int64_t> unmapped;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const std::int64_t value = source.pixels()[i];
    if (const auto it = mapping.table.find(value); it != mapping.table.end()) {
      out.pixels()[i] = it->second;
    } else if (mapping.default_id) {
      out.pixels()[i] = *mapping.default_id;
    } else {
      unmapped.insert(value);
    }
  }
  if (!unmapped.empty()) {
    throw UnmappedClassError(std::vector<std::int64_t>(unmapped.begin(), unmapped.end()));
  }
  return out;
}

IdImage remap_instances(const IdImage& instance) {
  IdImage out(instance.width(), instance.height());
  std::unordered_map<std::int32_t, std::int32_t> renumber;
  std::int32_t next = 1;
  for (std::size_t i = 0; i < instance.size(); ++i) {
    const std::int32_t value = instance.pixels()[i];
    if (value == 0) continue;
    const auto [it, inserted] = renumber.try_emplace(value, next);
    if (inserted) ++next;
    out.pixels()[i] = it->second;
  }
  return out;
}

std::vector<ObjectLabel> filter_labels(const std::vector<ObjectLabel>& labels,
                                       double max_distance) {
  std::vector<ObjectLabel> kept;
  for (const ObjectLabel& l : labels) {
    const double distance = std::sqrt(l.x * l.x + l.y * l.y + l.z * l.z);
    if (distance <= max_distance) kept.push_back(l);
  }
  return kept;
}

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kModerate: return "moderate";
    case Difficulty::kHard: return "hard";
    case Difficulty::kIgnored: return "ignored";
  }
  return "ignored";
}

void DifficultyRule::validate() const {
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i].min_bbox_height > levels[i - 1].min_bbox_height ||
        levels[i].max_occlusion < levels[i - 1].max_occlusion ||
        levels[i].max_truncation < levels[i - 1].max_truncation) {
      throw Error(ErrorCode::kConfig, "difficulty levels must loosen from easy to hard");
    }
  }
  if (min_occlusion_code < 0 || min_occlusion_code > 3) {
    throw Error(ErrorCode::kConfig, "min_occlusion_code must be in [0, 3]");
  }
}

Difficulty assign_difficulty(const ObjectLabel& label, const DifficultyRule& rule) {
  rule.validate();
  if (label.is_dont_care()) return Difficulty::kIgnored;
  const int occlusion = std::max(label.occlusion, rule.min_occlusion_code);
  const double height = label.bbox_height();
  constexpr Difficulty kOrder[] = {Difficulty::kEasy, Difficulty::kModerate, Difficulty::kHard};
  for (std::size_t i = 0; i < rule.levels.size(); ++i) {
    const auto& level = rule.levels[i];
    if (height >= level.min_bbox_height && occlusion <= level.max_occlusion &&
        label.truncation <= level.max_truncation) {
      return kOrder[i];
    }
  }
  return Difficulty::kIgnored;
}

int occlusion_code_from_fraction(double occlusion_fraction) {
  if (occlusion_fraction <= 0.1) return 1;
  if (occlusion_fraction <= 0.5) return 2;
  return 3;
}

ObjectLabel label_from_vkitti(const vkitti::Object& o) {
  ObjectLabel l;
  l.class_name = o.label;
  l.truncation = o.truncation;
  l.occlusion = occlusion_code_from_fraction(o.occlusion_fraction);
  l.alpha = o.alpha;
  l.bbox_left = o.left;
  l.bbox_top = o.top;
  l.bbox_right = o.right;
  l.bbox_bottom = o.bottom;
  l.height = o.height;
  l.width = o.width;
  l.length = o.length;
  l.x = o.x;
  l.y = o.y;
  l.z = o.z;
  l.rotation_y = o.rotation_y;
  return l;
}

namespace {

void require_rigid(const Eigen::Matrix4d& pose, const char* what) {
  const Eigen::Matrix3d rot = pose.topLeftCorner<3, 3>();
  const bool finite = pose.allFinite();
  const double det = finite ? rot.determinant() : 0.0;
  const bool orthonormal =
      finite && (rot * rot.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-6;
  const bool bottom_row = finite && (pose.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() < 1e-12;
  if (!orthonormal || !bottom_row || std::abs(det - 1.0) > 1e-6) {
    throw Error(ErrorCode::kDegeneratePose, std::string(what) + " is not a proper rigid transform");
  }
}

}  // namespace

CalibrationSet reconstruct_calibration(const CameraIntrinsics& k,
                                       const Eigen::Matrix4d& camera_pose,
                                       const Eigen::Matrix4d& lidar_pose) {
  require_rigid(camera_pose, "camera pose");
  require_rigid(lidar_pose, "lidar pose");
  if (!(k.fx > 0.0) || !(k.fy > 0.0)) {
    throw Error(ErrorCode::kConfig, "focal lengths must be positive");
  }
  Eigen::Matrix4d camera_inverse = Eigen::Matrix4d::Identity();
  const Eigen::Matrix3d rot_t = camera_pose.topLeftCorner<3, 3>().transpose();
  camera_inverse.topLeftCorner<3, 3>() = rot_t;
  camera_inverse.topRightCorner<3, 1>() = -rot_t * camera_pose.topRightCorner<3, 1>();

  Eigen::Matrix4d axes = Eigen::Matrix4d::Identity();
  axes.topLeftCorner<3, 3>() = lidar_to_camera_axes();

  const Eigen::Matrix4d lidar_to_cam = axes * camera_inverse * lidar_pose;

  CalibrationSet calib;
  calib.cam_projection.setZero();
  calib.cam_projection(0, 0) = k.fx;
  calib.cam_projection(1, 1) = k.fy;
  calib.cam_projection(0, 2) = k.cx;
  calib.cam_projection(1, 2) = k.cy;
  calib.cam_projection(2, 2) = 1.0;
  calib.rectification.setIdentity();
  calib.lidar_to_cam = lidar_to_cam.topRows<3>();
  return calib;
}

ProjectedFrame downsample_to_grid(const CameraFrame& frame, const PolarGridConfig& cfg) {
  cfg.validate();
  frame.validate();
  const int rows = cfg.crop_rows;
  const int cols = cfg.crop_cols;
  ProjectedFrame out(rows, cols);
  out.depth = resize_area_depth(frame.depth, cols, rows);
  if (!frame.rgb.empty()) out.rgb = resize_area(frame.rgb, cols, rows);
  if (!frame.semantic.empty()) out.semantic = resize_nearest(frame.semantic, cols, rows);
  if (!frame.instance.empty()) {
    out.instance = resize_nearest(frame.instance, cols, rows);
    out.edges = edge_map_from_instances(out.instance, out.semantic);
  }
  for (std::size_t i = 0; i < out.depth.size(); ++i) {
    out.coverage.pixels()[i] = out.depth.pixels()[i] > 0.0F ? 1 : 0;
  }
  return out;
}

TrainingPair build_training_pair(const LabeledFrame& frame, const TrainingPairOptions& options) {
  if (!frame.calib) {
    throw FrameError(frame.frame_id, ErrorCode::kMissingField, "calibration is missing");
  }
  if (!frame.scan) throw FrameError(frame.frame_id, ErrorCode::kMissingField, "scan is missing");
  if (frame.camera.depth.empty()) {
    throw FrameError(frame.frame_id, ErrorCode::kMissingField, "depth map is missing");
  }
  try {
    TrainingPair pair;
    pair.frame_id = frame.frame_id;
    const RowAssignment rows = assign_rows(*frame.scan, options.grid);
    const PolarGridImage full = rasterize_polar(*frame.scan, rows, options.grid);
    pair.target = denoise_grid(crop_to_camera_overlap(full, options.grid), options.denoise);

    ProjectedFrame projected =
        project_camera_to_lidar_grid(frame.camera, *frame.calib, options.grid, options.projection);
    projected = mask_occlusions_generously(projected, options.dilation_radius);
    if (!frame.camera.instance.empty()) {
      projected.edges = edge_map_from_instances(projected.instance, projected.semantic);
    }
    pair.input = apply_dont_care(projected, options.dont_care_id);
    return pair;
  } catch (const FrameError&) {
    throw;
  } catch (const Error& e) {
    throw FrameError(frame.frame_id, e.code(), e.what());
  }
}

}  // namespace lidarsim
