#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lidarsim/image.hpp"
#include "lidarsim/polar_grid.hpp"
#include "lidarsim/reprojection.hpp"

namespace lidarsim {

/// 16-bit gray PNG, intensity scaled by 65535.
std::vector<std::byte> encode_intensity_png(const IntensityImage& intensity);
/// Accepts 16-bit (/65535) or 8-bit (/255) gray PNGs.
IntensityImage decode_intensity_png(std::span<const std::byte> bytes);

/// Writes <stem>_intensity.png (16-bit, x65535), <stem>_valid.png (8-bit,
/// 0/255) and <stem>_depth.png (16-bit centimeters).
void write_polar_grid(const std::filesystem::path& dir, const std::string& stem,
                      const PolarGridImage& grid);
PolarGridImage read_polar_grid(const std::filesystem::path& dir, const std::string& stem);

/// Directory of rgb.png, depth.png (16-bit cm), semantic.png, instance.png
/// (8-bit, 16-bit when ids exceed 255), edges.png, mask.png, coverage.png
/// (0/255) plus meta.json holding `sidecar_json`.
void write_projected_frame(const std::filesystem::path& dir, const ProjectedFrame& frame,
                           std::string_view sidecar_json);
ProjectedFrame read_projected_frame(const std::filesystem::path& dir);

struct ManifestEntry {
  std::string id;
  std::string split;
  std::map<std::string, std::string> files;
};

struct Manifest {
  std::string kind;
  std::string config_hash;
  std::vector<ManifestEntry> frames;
  /// Frames left out on purpose (e.g. no objects in range).
  std::vector<std::string> excluded;
  /// frame id -> error message for frames that failed.
  std::map<std::string, std::string> errors;

  std::string to_json() const;
  static Manifest from_json(std::string_view text);
};

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace lidarsim
