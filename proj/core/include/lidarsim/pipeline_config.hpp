#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "lidarsim/cloud_synthesis.hpp"
#include "lidarsim/polar_grid.hpp"

namespace lidarsim {

/// Flat "key = value" settings with '#' comments. Later assignments win.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(std::string_view key) const { return values_.find(key) != values_.end(); }
  std::optional<std::string> get(std::string_view key) const;
  const std::map<std::string, std::string, std::less<>>& entries() const { return values_; }

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

/// Everything a pipeline command needs. Built from a KeyValueFile; see the
/// README for the key reference.
struct PipelineConfig {
  std::filesystem::path real_root;
  std::filesystem::path synthetic_root;
  std::filesystem::path output_root;

  PolarGridConfig grid;
  double elevation_top = 2.0 * kDegToRad;
  double elevation_bottom = -24.8 * kDegToRad;
  DenoiseMethod denoise = DenoiseMethod::kMedian3;

  double occlusion_gap = 1.0;
  int dilation_radius = 1;
  std::int32_t dont_care_id = 0;

  double real_depth_meters_per_unit = 0.01;
  /// Position of the depth crop in the camera image; derived from the RGB
  /// image size (bottom-centered crop) when unset.
  std::optional<int> real_depth_origin_u;
  std::optional<int> real_depth_origin_v;

  double synth_depth_meters_per_unit = 0.01;
  double synth_source_max = 655.35;
  double synth_target_max = 80.0;
  std::filesystem::path class_mapping_path;
  int synth_camera_id = 0;
  /// LiDAR position relative to the camera, LiDAR axes, meters.
  double lidar_offset_x = -0.27;
  double lidar_offset_y = 0.0;
  double lidar_offset_z = 0.08;
  double max_distance = 80.0;

  SparsifyConfig sparsify;
  IntensityPlacement placement;
  bool drop_zero = false;
  float drop_threshold = 0.0F;
  double drop_probability = 1.0;
  std::filesystem::path intensity_dir;

  std::set<std::string> val_split;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool strict = false;

  /// Relative paths resolve against `base_dir`. Throws kConfig on unknown
  /// keys or bad values.
  static PipelineConfig from_key_values(const KeyValueFile& kv,
                                        const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& file, const KeyValueFile& overrides = {});

  std::vector<double> elevation_table() const;
  /// Stable digest of every setting that can change output contents (jobs and
  /// output_root excluded).
  std::string hash() const;
  std::string canonical_text() const;
};

}  // namespace lidarsim
