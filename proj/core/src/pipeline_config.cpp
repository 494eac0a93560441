#include "lidarsim/pipeline_config.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "lidarsim/error.hpp"
#include "lidarsim/frame_io.hpp"
#include "lidarsim/kitti_io.hpp"
#include "text_util.hpp"

namespace lidarsim {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw Error(ErrorCode::kConfig, key + ": expected " + want + ", got '" + value + "'");
}

double as_double(const std::string& key, const std::string& value) {
  const auto v = detail::parse_double(detail::trim(value));
  if (!v || !std::isfinite(*v)) bad_value(key, value, "a number");
  return *v;
}

long long as_int(const std::string& key, const std::string& value) {
  const auto v = detail::parse_int(detail::trim(value));
  if (!v) bad_value(key, value, "an integer");
  return *v;
}

int as_small_int(const std::string& key, const std::string& value) {
  const long long v = as_int(key, value);
  if (v < -1'000'000'000LL || v > 1'000'000'000LL) bad_value(key, value, "a small integer");
  return static_cast<int>(v);
}

bool as_bool(const std::string& key, const std::string& value) {
  const std::string_view v = detail::trim(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, value, "a boolean");
}

fs::path as_path(const std::string& value, const fs::path& base) {
  const fs::path p(std::string(detail::trim(value)));
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&,
                                  const fs::path&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto path_field = [](fs::path PipelineConfig::*field) {
      return [field](PipelineConfig& c, const std::string&, const std::string& v,
                     const fs::path& base) { c.*field = as_path(v, base); };
    };
    auto int_field = [](auto member_ptr) {
      return [member_ptr](PipelineConfig& c, const std::string& k, const std::string& v,
                          const fs::path&) { member_ptr(c) = as_small_int(k, v); };
    };
    auto double_field = [](auto member_ptr, double scale = 1.0) {
      return [member_ptr, scale](PipelineConfig& c, const std::string& k, const std::string& v,
                                 const fs::path&) { member_ptr(c) = as_double(k, v) * scale; };
    };

    t["real_root"] = path_field(&PipelineConfig::real_root);
    t["synthetic_root"] = path_field(&PipelineConfig::synthetic_root);
    t["output_root"] = path_field(&PipelineConfig::output_root);

    t["grid.num_rows"] = int_field([](PipelineConfig& c) -> int& { return c.grid.num_rows; });
    t["grid.full_cols"] = int_field([](PipelineConfig& c) -> int& { return c.grid.full_cols; });
    t["grid.crop_rows"] = int_field([](PipelineConfig& c) -> int& { return c.grid.crop_rows; });
    t["grid.crop_cols"] = int_field([](PipelineConfig& c) -> int& { return c.grid.crop_cols; });
    t["grid.crop_row_offset"] =
        int_field([](PipelineConfig& c) -> int& { return c.grid.crop_row_offset; });
    t["grid.crop_col_offset"] =
        int_field([](PipelineConfig& c) -> int& { return c.grid.crop_col_offset; });
    t["grid.azimuth_zero_deg"] = double_field(
        [](PipelineConfig& c) -> double& { return c.grid.azimuth_zero; }, kDegToRad);
    t["grid.elevation_top_deg"] =
        double_field([](PipelineConfig& c) -> double& { return c.elevation_top; }, kDegToRad);
    t["grid.elevation_bottom_deg"] =
        double_field([](PipelineConfig& c) -> double& { return c.elevation_bottom; }, kDegToRad);
    t["grid.denoise"] = [](PipelineConfig& c, const std::string& k, const std::string& v,
                           const fs::path&) {
      const std::string_view s = detail::trim(v);
      if (s == "none") {
        c.denoise = DenoiseMethod::kNone;
      } else if (s == "median3") {
        c.denoise = DenoiseMethod::kMedian3;
      } else {
        bad_value(k, v, "none or median3");
      }
    };

    t["occlusion.gap"] =
        double_field([](PipelineConfig& c) -> double& { return c.occlusion_gap; });
    t["occlusion.dilation_radius"] =
        int_field([](PipelineConfig& c) -> int& { return c.dilation_radius; });
    t["dont_care_id"] = int_field([](PipelineConfig& c) -> std::int32_t& { return c.dont_care_id; });

    t["real.depth_meters_per_unit"] =
        double_field([](PipelineConfig& c) -> double& { return c.real_depth_meters_per_unit; });
    t["real.depth_origin_u"] = [](PipelineConfig& c, const std::string& k, const std::string& v,
                                  const fs::path&) { c.real_depth_origin_u = as_small_int(k, v); };
    t["real.depth_origin_v"] = [](PipelineConfig& c, const std::string& k, const std::string& v,
                                  const fs::path&) { c.real_depth_origin_v = as_small_int(k, v); };

    t["synth.depth_meters_per_unit"] =
        double_field([](PipelineConfig& c) -> double& { return c.synth_depth_meters_per_unit; });
    t["synth.source_max"] =
        double_field([](PipelineConfig& c) -> double& { return c.synth_source_max; });
    t["synth.target_max"] =
        double_field([](PipelineConfig& c) -> double& { return c.synth_target_max; });
    t["synth.class_mapping"] = path_field(&PipelineConfig::class_mapping_path);
    t["synth.camera_id"] = int_field([](PipelineConfig& c) -> int& { return c.synth_camera_id; });
    t["synth.lidar_offset"] = [](PipelineConfig& c, const std::string& k, const std::string& v,
                                 const fs::path&) {
      const auto tokens = detail::split_whitespace(v);
      if (tokens.size() != 3) bad_value(k, v, "three numbers");
      c.lidar_offset_x = as_double(k, std::string(tokens[0]));
      c.lidar_offset_y = as_double(k, std::string(tokens[1]));
      c.lidar_offset_z = as_double(k, std::string(tokens[2]));
    };
    t["synth.max_distance"] =
        double_field([](PipelineConfig& c) -> double& { return c.max_distance; });

    t["sparsify.lines"] =
        int_field([](PipelineConfig& c) -> int& { return c.sparsify.n_lines; });
    t["sparsify.elevation_min_deg"] = double_field(
        [](PipelineConfig& c) -> double& { return c.sparsify.elevation_min; }, kDegToRad);
    t["sparsify.elevation_max_deg"] = double_field(
        [](PipelineConfig& c) -> double& { return c.sparsify.elevation_max; }, kDegToRad);

    t["intensity.dir"] = path_field(&PipelineConfig::intensity_dir);
    t["intensity.width"] =
        int_field([](PipelineConfig& c) -> int& { return c.placement.target_width; });
    t["intensity.height"] =
        int_field([](PipelineConfig& c) -> int& { return c.placement.target_height; });
    t["intensity.origin_u"] =
        int_field([](PipelineConfig& c) -> int& { return c.placement.origin_u; });
    t["intensity.origin_v"] =
        int_field([](PipelineConfig& c) -> int& { return c.placement.origin_v; });

    t["drop.zero"] = [](PipelineConfig& c, const std::string& k, const std::string& v,
                        const fs::path&) { c.drop_zero = as_bool(k, v); };
    t["drop.threshold"] = [](PipelineConfig& c, const std::string& k, const std::string& v,
                             const fs::path&) {
      c.drop_threshold = static_cast<float>(as_double(k, v));
    };
    t["drop.probability"] =
        double_field([](PipelineConfig& c) -> double& { return c.drop_probability; });

    t["split.val"] = [](PipelineConfig& c, const std::string&, const std::string& v,
                        const fs::path&) {
      c.val_split.clear();
      std::string flat = v;
      for (char& ch : flat) {
        if (ch == ',') ch = ' ';
      }
      for (const auto token : detail::split_whitespace(flat)) c.val_split.emplace(token);
    };
    t["seed"] = [](PipelineConfig& c, const std::string& k, const std::string& v,
                   const fs::path&) {
      const long long s = as_int(k, v);
      if (s < 0) bad_value(k, v, "a non-negative integer");
      c.seed = static_cast<std::uint64_t>(s);
    };
    t["jobs"] = int_field([](PipelineConfig& c) -> int& { return c.jobs; });
    t["strict"] = [](PipelineConfig& c, const std::string& k, const std::string& v,
                     const fs::path&) { c.strict = as_bool(k, v); };
    return t;
  }();
  return table;
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile kv;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw LineParseError(line_no, "expected 'key = value'");
    }
    const std::string_view key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw LineParseError(line_no, "empty key");
    kv.set(std::string(key), std::string(detail::trim(line.substr(eq + 1))));
  }
  return kv;
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

PipelineConfig PipelineConfig::from_key_values(const KeyValueFile& kv, const fs::path& base_dir) {
  PipelineConfig cfg;
  const auto& table = setters();
  for (const auto& [key, value] : kv.entries()) {
    const auto it = table.find(key);
    if (it == table.end()) throw Error(ErrorCode::kConfig, "unknown key '" + key + "'");
    it->second(cfg, key, value, base_dir);
  }

  cfg.grid.validate();
  if (!(cfg.elevation_top > cfg.elevation_bottom)) {
    throw Error(ErrorCode::kConfig, "grid.elevation_top_deg must exceed grid.elevation_bottom_deg");
  }
  // The target layout shares the panorama's azimuth binning; its elevation
  // span follows the grid unless set explicitly.
  cfg.sparsify.full_cols = cfg.grid.full_cols;
  cfg.sparsify.azimuth_zero = cfg.grid.azimuth_zero;
  if (!kv.has("sparsify.elevation_min_deg")) cfg.sparsify.elevation_min = cfg.elevation_bottom;
  if (!kv.has("sparsify.elevation_max_deg")) cfg.sparsify.elevation_max = cfg.elevation_top;
  cfg.sparsify.validate();

  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kConfig, what);
  };
  require(cfg.occlusion_gap > 0.0, "occlusion.gap must be positive");
  require(cfg.dilation_radius >= 0, "occlusion.dilation_radius must be >= 0");
  require(cfg.real_depth_meters_per_unit > 0.0, "real.depth_meters_per_unit must be positive");
  require(cfg.synth_depth_meters_per_unit > 0.0, "synth.depth_meters_per_unit must be positive");
  require(cfg.synth_source_max > 0.0 && cfg.synth_target_max > 0.0,
          "synth.source_max and synth.target_max must be positive");
  require(cfg.max_distance > 0.0, "synth.max_distance must be positive");
  require(cfg.placement.target_width > 0 && cfg.placement.target_height > 0,
          "intensity.width and intensity.height must be positive");
  require(cfg.drop_probability >= 0.0 && cfg.drop_probability <= 1.0,
          "drop.probability must be in [0, 1]");
  require(cfg.jobs >= 1 && cfg.jobs <= 256, "jobs must be in [1, 256]");
  require(!cfg.real_depth_origin_u || *cfg.real_depth_origin_u >= 0,
          "real.depth_origin_u must be >= 0");
  require(!cfg.real_depth_origin_v || *cfg.real_depth_origin_v >= 0,
          "real.depth_origin_v must be >= 0");
  return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& file, const KeyValueFile& overrides) {
  if (!fs::is_regular_file(file)) {
    throw Error(ErrorCode::kConfig, "config file not found: " + file.string());
  }
  KeyValueFile kv;
  try {
    kv = KeyValueFile::parse(read_text_file(file));
  } catch (const LineParseError& e) {
    throw Error(ErrorCode::kConfig, file.string() + ":" + std::to_string(e.line_number()) + ": " +
                                        "expected 'key = value'");
  }
  for (const auto& [key, value] : overrides.entries()) kv.set(key, value);
  const fs::path base = file.has_parent_path() ? file.parent_path() : fs::path(".");
  return from_key_values(kv, base);
}

std::vector<double> PipelineConfig::elevation_table() const {
  std::vector<double> table(static_cast<std::size_t>(grid.num_rows));
  const double step = grid.num_rows > 1 ? (elevation_top - elevation_bottom) / (grid.num_rows - 1)
                                        : 0.0;
  for (int r = 0; r < grid.num_rows; ++r) table[static_cast<std::size_t>(r)] = elevation_top - r * step;
  return table;
}

std::string PipelineConfig::canonical_text() const {
  std::map<std::string, std::string> out;
  auto num = [](double v) { return detail::format_shortest(v); };
  out["real_root"] = real_root.generic_string();
  out["synthetic_root"] = synthetic_root.generic_string();
  out["grid.num_rows"] = std::to_string(grid.num_rows);
  out["grid.full_cols"] = std::to_string(grid.full_cols);
  out["grid.crop_rows"] = std::to_string(grid.crop_rows);
  out["grid.crop_cols"] = std::to_string(grid.crop_cols);
  out["grid.crop_row_offset"] = std::to_string(grid.crop_row_offset);
  out["grid.crop_col_offset"] = std::to_string(grid.crop_col_offset);
  out["grid.azimuth_zero"] = num(grid.azimuth_zero);
  out["grid.elevation_top"] = num(elevation_top);
  out["grid.elevation_bottom"] = num(elevation_bottom);
  out["grid.denoise"] = denoise == DenoiseMethod::kNone ? "none" : "median3";
  out["occlusion.gap"] = num(occlusion_gap);
  out["occlusion.dilation_radius"] = std::to_string(dilation_radius);
  out["dont_care_id"] = std::to_string(dont_care_id);
  out["real.depth_meters_per_unit"] = num(real_depth_meters_per_unit);
  out["real.depth_origin_u"] = real_depth_origin_u ? std::to_string(*real_depth_origin_u) : "auto";
  out["real.depth_origin_v"] = real_depth_origin_v ? std::to_string(*real_depth_origin_v) : "auto";
  out["synth.depth_meters_per_unit"] = num(synth_depth_meters_per_unit);
  out["synth.source_max"] = num(synth_source_max);
  out["synth.target_max"] = num(synth_target_max);
  out["synth.class_mapping"] = class_mapping_path.generic_string();
  out["synth.camera_id"] = std::to_string(synth_camera_id);
  out["synth.lidar_offset"] = num(lidar_offset_x) + " " + num(lidar_offset_y) + " " +
                              num(lidar_offset_z);
  out["synth.max_distance"] = num(max_distance);
  out["sparsify.lines"] = std::to_string(sparsify.n_lines);
  out["sparsify.elevation_min"] = num(sparsify.elevation_min);
  out["sparsify.elevation_max"] = num(sparsify.elevation_max);
  out["intensity.dir"] = intensity_dir.generic_string();
  out["intensity.width"] = std::to_string(placement.target_width);
  out["intensity.height"] = std::to_string(placement.target_height);
  out["intensity.origin_u"] = std::to_string(placement.origin_u);
  out["intensity.origin_v"] = std::to_string(placement.origin_v);
  out["drop.zero"] = drop_zero ? "true" : "false";
  out["drop.threshold"] = detail::format_shortest(drop_threshold);
  out["drop.probability"] = num(drop_probability);
  std::string split;
  for (const auto& id : val_split) split += (split.empty() ? "" : " ") + id;
  out["split.val"] = split;
  out["seed"] = std::to_string(seed);
  out["strict"] = strict ? "true" : "false";

  std::ostringstream text;
  for (const auto& [k, v] : out) text << k << '=' << v << '\n';
  return text.str();
}

std::string PipelineConfig::hash() const { return fnv1a_hex(canonical_text()); }

}  // namespace lidarsim
