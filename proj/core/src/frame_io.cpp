#include "lidarsim/frame_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "lidarsim/error.hpp"
#include "lidarsim/kitti_io.hpp"
#include "lidarsim/png_io.hpp"

namespace lidarsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

MaskImage decode_mask(std::span<const std::byte> bytes) {
  auto raw = png::decode_gray8(bytes);
  for (auto& v : raw.pixels()) v = v != 0 ? 1 : 0;
  return raw;
}

std::vector<std::byte> encode_mask(const MaskImage& mask) {
  MaskImage scaled(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) scaled.pixels()[i] = mask.pixels()[i] != 0 ? 255 : 0;
  return png::encode_gray8(scaled);
}

std::vector<std::byte> encode_ids(const IdImage& ids) {
  const auto [lo, hi] = std::minmax_element(ids.pixels().begin(), ids.pixels().end());
  if (lo != ids.pixels().end() && *lo < 0) {
    throw Error(ErrorCode::kUnsupportedFormat, "negative ids cannot be stored as PNG");
  }
  if (hi != ids.pixels().end() && *hi > 255) {
    Image<std::uint16_t> wide(ids.width(), ids.height());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      wide.pixels()[i] = static_cast<std::uint16_t>(std::min(ids.pixels()[i], 65535));
    }
    return png::encode_gray16(wide);
  }
  MaskImage narrow(ids.width(), ids.height());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    narrow.pixels()[i] = static_cast<std::uint8_t>(ids.pixels()[i]);
  }
  return png::encode_gray8(narrow);
}

}  // namespace

std::vector<std::byte> encode_intensity_png(const IntensityImage& intensity) {
  Image<std::uint16_t> raw(intensity.width(), intensity.height());
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    const double v = std::clamp(static_cast<double>(intensity.pixels()[i]), 0.0, 1.0);
    raw.pixels()[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
  }
  return png::encode_gray16(raw);
}

IntensityImage decode_intensity_png(std::span<const std::byte> bytes) {
  const auto raster = png::decode(bytes);
  if (raster.channels != 1 || raster.palette) {
    throw Error(ErrorCode::kUnsupportedFormat, "intensity images must be single-channel gray");
  }
  const double scale = raster.bit_depth == 16 ? 65535.0 : 255.0;
  IntensityImage out(raster.width, raster.height);
  for (std::size_t i = 0; i < raster.samples.size(); ++i) {
    out.pixels()[i] = static_cast<float>(raster.samples[i] / scale);
  }
  return out;
}

void write_polar_grid(const fs::path& dir, const std::string& stem, const PolarGridImage& grid) {
  write_file(dir / (stem + "_intensity.png"), encode_intensity_png(grid.intensity));
  write_file(dir / (stem + "_valid.png"), encode_mask(grid.valid));
  write_file(dir / (stem + "_depth.png"), kitti::encode_depth_png(grid.depth));
}

PolarGridImage read_polar_grid(const fs::path& dir, const std::string& stem) {
  PolarGridImage grid;
  grid.intensity = decode_intensity_png(read_file(dir / (stem + "_intensity.png")));
  grid.valid = decode_mask(read_file(dir / (stem + "_valid.png")));
  grid.depth = kitti::load_depth_png(read_file(dir / (stem + "_depth.png")));
  require_same_shape(grid.intensity, grid.valid, "polar grid");
  require_same_shape(grid.depth, grid.valid, "polar grid");
  for (std::size_t i = 0; i < grid.valid.size(); ++i) {
    if (grid.valid.pixels()[i] == 0) {
      grid.intensity.pixels()[i] = 0.0F;
      grid.depth.pixels()[i] = 0.0F;
    }
  }
  return grid;
}

void write_projected_frame(const fs::path& dir, const ProjectedFrame& frame,
                           std::string_view sidecar_json) {
  write_file(dir / "rgb.png", png::encode_rgb8(frame.rgb));
  write_file(dir / "depth.png", kitti::encode_depth_png(frame.depth));
  write_file(dir / "semantic.png", encode_ids(frame.semantic));
  write_file(dir / "instance.png", encode_ids(frame.instance));
  write_file(dir / "edges.png", encode_mask(frame.edges));
  write_file(dir / "mask.png", encode_mask(frame.occlusion_mask));
  write_file(dir / "coverage.png", encode_mask(frame.coverage));
  write_text_file(dir / "meta.json", sidecar_json);
}

ProjectedFrame read_projected_frame(const fs::path& dir) {
  ProjectedFrame frame;
  frame.rgb = png::decode_rgb8(read_file(dir / "rgb.png"));
  frame.depth = kitti::load_depth_png(read_file(dir / "depth.png"));
  frame.semantic = kitti::load_id_png(read_file(dir / "semantic.png"));
  frame.instance = kitti::load_id_png(read_file(dir / "instance.png"));
  frame.edges = decode_mask(read_file(dir / "edges.png"));
  frame.occlusion_mask = decode_mask(read_file(dir / "mask.png"));
  frame.coverage = decode_mask(read_file(dir / "coverage.png"));
  return frame;
}

std::string Manifest::to_json() const {
  json doc;
  doc["kind"] = kind;
  doc["config_hash"] = config_hash;
  json frames_json = json::array();
  for (const auto& f : frames) {
    frames_json.push_back({{"id", f.id}, {"split", f.split}, {"files", f.files}});
  }
  doc["frames"] = std::move(frames_json);
  doc["excluded"] = excluded;
  doc["errors"] = errors;
  return doc.dump(2) + "\n";
}

Manifest Manifest::from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    Manifest m;
    m.kind = doc.value("kind", "");
    m.config_hash = doc.value("config_hash", "");
    for (const auto& f : doc.at("frames")) {
      ManifestEntry e;
      e.id = f.at("id").get<std::string>();
      e.split = f.value("split", "train");
      e.files = f.value("files", std::map<std::string, std::string>{});
      m.frames.push_back(std::move(e));
    }
    m.excluded = doc.value("excluded", std::vector<std::string>{});
    m.errors = doc.value("errors", std::map<std::string, std::string>{});
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedFile, std::string("manifest: ") + e.what());
  }
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : data) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace lidarsim
