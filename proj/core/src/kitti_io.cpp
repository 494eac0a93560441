#include "lidarsim/kitti_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "lidarsim/error.hpp"
#include "lidarsim/png_io.hpp"
#include "text_util.hpp"

namespace lidarsim {

std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
    throw Error(ErrorCode::kIo, "short read on " + path.string());
  }
  return bytes;
}

std::string read_text_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

void write_file(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed on " + path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::as_bytes(std::span<const char>(text.data(), text.size())));
}

}  // namespace lidarsim

namespace lidarsim::kitti {
namespace {

constexpr std::size_t kRecordBytes = 16;

float load_le_float(const std::byte* src) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, src, sizeof(bits));
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  return std::bit_cast<float>(bits);
}

void store_le_float(float value, std::byte* dst) {
  auto bits = std::bit_cast<std::uint32_t>(value);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
  std::memcpy(dst, &bits, sizeof(bits));
}

template <int Rows, int Cols>
Eigen::Matrix<double, Rows, Cols> to_matrix(const std::vector<double>& values) {
  Eigen::Matrix<double, Rows, Cols> m;
  for (int r = 0; r < Rows; ++r) {
    for (int c = 0; c < Cols; ++c) m(r, c) = values[static_cast<std::size_t>(r * Cols + c)];
  }
  return m;
}

template <typename Derived>
void append_matrix(std::ostringstream& os, const char* key, const Eigen::MatrixBase<Derived>& m) {
  os << key << ':';
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) os << ' ' << detail::format_shortest(m(r, c));
  }
  os << '\n';
}

}  // namespace

PointCloud parse_velodyne_bin(std::span<const std::byte> bytes, VelodyneParseStats* stats) {
  if (bytes.size() % kRecordBytes != 0) {
    throw Error(ErrorCode::kMalformedFile, "velodyne payload of " + std::to_string(bytes.size()) +
                                               " bytes is not a multiple of 16");
  }
  const std::size_t count = bytes.size() / kRecordBytes;
  PointCloud cloud;
  cloud.points.resize(count);
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::byte* record = bytes.data() + i * kRecordBytes;
    Point& p = cloud.points[i];
    p.x = load_le_float(record);
    p.y = load_le_float(record + 4);
    p.z = load_le_float(record + 8);
    p.intensity = load_le_float(record + 12);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw MalformedRecordError(i, "non-finite coordinate");
    }
    if (std::isnan(p.intensity)) throw MalformedRecordError(i, "NaN intensity");
    if (p.intensity < 0.0F || p.intensity > 1.0F) {
      p.intensity = std::clamp(p.intensity, 0.0F, 1.0F);
      ++clamped;
    }
  }
  if (stats != nullptr) stats->clamped_intensity += clamped;
  return cloud;
}

std::vector<std::byte> write_velodyne_bin(const PointCloud& cloud) {
  std::vector<std::byte> bytes(cloud.size() * kRecordBytes);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::byte* record = bytes.data() + i * kRecordBytes;
    const Point& p = cloud.points[i];
    store_le_float(p.x, record);
    store_le_float(p.y, record + 4);
    store_le_float(p.z, record + 8);
    store_le_float(p.intensity, record + 12);
  }
  return bytes;
}

CalibrationSet parse_calib(std::string_view text) {
  std::map<std::string, std::vector<double>, std::less<>> entries;
  const auto lines = detail::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = detail::trim(lines[n]);
    if (line.empty()) continue;
    std::string_view key;
    std::string_view rest;
    if (const auto colon = line.find(':'); colon != std::string_view::npos) {
      key = detail::trim(line.substr(0, colon));
      rest = line.substr(colon + 1);
    } else {
      const auto space = line.find_first_of(" \t");
      key = line.substr(0, space);
      rest = space == std::string_view::npos ? std::string_view{} : line.substr(space);
    }
    std::vector<double> values;
    for (const auto token : detail::split_whitespace(rest)) {
      const auto v = detail::parse_double(token);
      if (!v) throw LineParseError(n + 1, "non-numeric value '" + std::string(token) + "'");
      values.push_back(*v);
    }
    entries[std::string(key)] = std::move(values);
  }

  const auto fetch = [&](std::string_view key, std::size_t arity) -> const std::vector<double>& {
    const auto it = entries.find(key);
    if (it == entries.end()) throw MissingFieldError(std::string(key));
    if (it->second.size() != arity) {
      throw Error(ErrorCode::kArity, std::string(key) + " has " +
                                         std::to_string(it->second.size()) + " values, expected " +
                                         std::to_string(arity));
    }
    return it->second;
  };

  CalibrationSet calib;
  calib.cam_projection = to_matrix<3, 4>(fetch("P2", 12));
  calib.rectification = to_matrix<3, 3>(fetch("R0_rect", 9));
  calib.lidar_to_cam = to_matrix<3, 4>(fetch("Tr_velo_to_cam", 12));
  return calib;
}

std::string write_calib(const CalibrationSet& calib) {
  std::ostringstream os;
  append_matrix(os, "P0", calib.cam_projection);
  append_matrix(os, "P1", calib.cam_projection);
  append_matrix(os, "P2", calib.cam_projection);
  append_matrix(os, "P3", calib.cam_projection);
  append_matrix(os, "R0_rect", calib.rectification);
  append_matrix(os, "Tr_velo_to_cam", calib.lidar_to_cam);
  Matrix34 imu = Matrix34::Zero();
  imu.leftCols<3>().setIdentity();
  append_matrix(os, "Tr_imu_to_velo", imu);
  return os.str();
}

std::vector<ObjectLabel> parse_labels(std::string_view text) {
  std::vector<ObjectLabel> labels;
  const auto lines = detail::split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto tokens = detail::split_whitespace(lines[n]);
    if (tokens.empty()) continue;
    if (tokens.size() != 15) {
      throw LineParseError(n + 1, "expected 15 fields, found " + std::to_string(tokens.size()));
    }
    double values[14];
    for (std::size_t f = 1; f < 15; ++f) {
      const auto v = detail::parse_double(tokens[f]);
      if (!v) {
        throw LineParseError(n + 1, "field " + std::to_string(f + 1) + " is not numeric: '" +
                                        std::string(tokens[f]) + "'");
      }
      values[f - 1] = *v;
    }
    const auto occlusion = detail::parse_int(tokens[2]);
    if (!occlusion) throw LineParseError(n + 1, "occlusion must be an integer");

    ObjectLabel label;
    label.class_name = std::string(tokens[0]);
    label.truncation = values[0];
    label.occlusion = static_cast<int>(*occlusion);
    label.alpha = values[2];
    label.bbox_left = values[3];
    label.bbox_top = values[4];
    label.bbox_right = values[5];
    label.bbox_bottom = values[6];
    label.height = values[7];
    label.width = values[8];
    label.length = values[9];
    label.x = values[10];
    label.y = values[11];
    label.z = values[12];
    label.rotation_y = values[13];
    labels.push_back(std::move(label));
  }
  return labels;
}

std::string write_labels(std::span<const ObjectLabel> labels) {
  std::string out;
  for (const ObjectLabel& l : labels) {
    const double fields[] = {l.alpha,  l.bbox_left, l.bbox_top, l.bbox_right, l.bbox_bottom,
                             l.height, l.width,     l.length,   l.x,          l.y,
                             l.z,      l.rotation_y};
    out += l.class_name;
    out += ' ';
    out += detail::format_fixed(l.truncation, 2);
    out += ' ';
    out += std::to_string(l.occlusion);
    for (double f : fields) {
      out += ' ';
      out += detail::format_fixed(f, 2);
    }
    out += '\n';
  }
  return out;
}

DepthImage load_depth_png(std::span<const std::byte> bytes, double meters_per_unit) {
  const auto raw = png::decode_gray16(bytes);
  DepthImage depth(raw.width(), raw.height());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    depth.pixels()[i] = static_cast<float>(static_cast<double>(raw.pixels()[i]) * meters_per_unit);
  }
  return depth;
}

std::vector<std::byte> encode_depth_png(const DepthImage& depth, double meters_per_unit) {
  Image<std::uint16_t> raw(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double units = std::round(static_cast<double>(depth.pixels()[i]) / meters_per_unit);
    raw.pixels()[i] = static_cast<std::uint16_t>(std::clamp(units, 0.0, 65535.0));
  }
  return png::encode_gray16(raw);
}

IdImage load_id_png(std::span<const std::byte> bytes) {
  const auto raster = png::decode(bytes);
  if (raster.channels != 1) {
    throw Error(ErrorCode::kUnsupportedFormat, "id maps must be single-channel or palette PNGs");
  }
  IdImage ids(raster.width, raster.height);
  std::copy(raster.samples.begin(), raster.samples.end(), ids.pixels().begin());
  return ids;
}

IdImage load_color_id_png(std::span<const std::byte> bytes) {
  const auto rgb = png::decode_rgb8(bytes);
  IdImage ids(rgb.width(), rgb.height());
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    const Rgb c = rgb.pixels()[i];
    ids.pixels()[i] = (std::int32_t{c.r} << 16) | (std::int32_t{c.g} << 8) | std::int32_t{c.b};
  }
  return ids;
}

RgbImage load_rgb_png(std::span<const std::byte> bytes) { return png::decode_rgb8(bytes); }

std::string write_ply(const PointCloud& cloud) {
  std::ostringstream os;
  os << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
     << "\nproperty float x\nproperty float y\nproperty float z\nproperty float intensity\n"
        "end_header\n";
  for (const Point& p : cloud.points) {
    os << detail::format_shortest(p.x) << ' ' << detail::format_shortest(p.y) << ' '
       << detail::format_shortest(p.z) << ' ' << detail::format_shortest(p.intensity) << '\n';
  }
  return os.str();
}

}  // namespace lidarsim::kitti
