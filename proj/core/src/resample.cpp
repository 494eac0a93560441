#include "lidarsim/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace lidarsim {
namespace {

struct Span1d {
  int index;
  double weight;
};

// Source pixels overlapping output pixel `o` along one axis, with overlap length.
std::vector<std::vector<Span1d>> footprints(int src_len, int dst_len) {
  std::vector<std::vector<Span1d>> spans(static_cast<std::size_t>(dst_len));
  const double scale = static_cast<double>(src_len) / dst_len;
  for (int o = 0; o < dst_len; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(static_cast<int>(std::ceil(hi)), src_len);
    for (int s = first; s < last; ++s) {
      const double w = std::min<double>(hi, s + 1) - std::max<double>(lo, s);
      if (w > 1e-12) spans[static_cast<std::size_t>(o)].push_back({s, w});
    }
  }
  return spans;
}

}  // namespace

RgbImage resize_area(const RgbImage& src, int width, int height) {
  RgbImage out(width, height);
  if (src.empty()) return out;
  const auto rows = footprints(src.height(), height);
  const auto cols = footprints(src.width(), width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      std::array<double, 3> acc{0.0, 0.0, 0.0};
      double total = 0.0;
      for (const auto& rs : rows[static_cast<std::size_t>(r)]) {
        for (const auto& cs : cols[static_cast<std::size_t>(c)]) {
          const double w = rs.weight * cs.weight;
          const Rgb px = src.at(rs.index, cs.index);
          acc[0] += w * px.r;
          acc[1] += w * px.g;
          acc[2] += w * px.b;
          total += w;
        }
      }
      const auto channel = [&](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v / total), 0L, 255L));
      };
      out.at(r, c) = Rgb{channel(acc[0]), channel(acc[1]), channel(acc[2])};
    }
  }
  return out;
}

DepthImage resize_area_depth(const DepthImage& src, int width, int height) {
  DepthImage out(width, height);
  if (src.empty()) return out;
  const auto rows = footprints(src.height(), height);
  const auto cols = footprints(src.width(), width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double acc = 0.0;
      double total = 0.0;
      for (const auto& rs : rows[static_cast<std::size_t>(r)]) {
        for (const auto& cs : cols[static_cast<std::size_t>(c)]) {
          const float d = src.at(rs.index, cs.index);
          if (!(d > 0.0F)) continue;
          const double w = rs.weight * cs.weight;
          acc += w * d;
          total += w;
        }
      }
      out.at(r, c) = total > 0.0 ? static_cast<float>(acc / total) : 0.0F;
    }
  }
  return out;
}

}  // namespace lidarsim
