#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lidarsim/calibration.hpp"
#include "lidarsim/image.hpp"
#include "lidarsim/object_label.hpp"
#include "lidarsim/point_cloud.hpp"

namespace lidarsim {

std::vector<std::byte> read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace lidarsim

namespace lidarsim::kitti {

struct VelodyneParseStats {
  /// Records whose intensity was outside [0,1] and got clamped.
  std::size_t clamped_intensity = 0;
};

/// Decodes consecutive little-endian float32 quadruples (x, y, z, intensity).
PointCloud parse_velodyne_bin(std::span<const std::byte> bytes,
                              VelodyneParseStats* stats = nullptr);
std::vector<std::byte> write_velodyne_bin(const PointCloud& cloud);

/// Reads P2, R0_rect and Tr_velo_to_cam from a "KEY: v1 v2 ..." file.
CalibrationSet parse_calib(std::string_view text);
/// Emits P0..P3 (all equal to cam_projection), R0_rect, Tr_velo_to_cam and
/// an identity Tr_imu_to_velo so standard KITTI tooling accepts the file.
/// Values are written in shortest round-trip form.
std::string write_calib(const CalibrationSet& calib);

std::vector<ObjectLabel> parse_labels(std::string_view text);
/// KITTI layout: occlusion as integer, all other numbers with 2 decimals.
std::string write_labels(std::span<const ObjectLabel> labels);

/// 16-bit single-channel PNG; stored value times meters_per_unit gives meters.
DepthImage load_depth_png(std::span<const std::byte> bytes, double meters_per_unit = 0.01);
/// Inverse of load_depth_png. Values are rounded and saturated to 16 bits.
std::vector<std::byte> encode_depth_png(const DepthImage& depth, double meters_per_unit = 0.01);

/// Segmentation ids from an 8-bit gray, 8-bit palette, or 16-bit gray PNG.
IdImage load_id_png(std::span<const std::byte> bytes);
/// RGB(A) PNG, colors packed as 0xRRGGBB. Used for color-coded label maps.
IdImage load_color_id_png(std::span<const std::byte> bytes);
RgbImage load_rgb_png(std::span<const std::byte> bytes);

/// ASCII PLY with x y z intensity per vertex.
std::string write_ply(const PointCloud& cloud);

}  // namespace lidarsim::kitti
