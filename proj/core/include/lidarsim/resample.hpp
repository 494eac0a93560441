#pragma once

#include <algorithm>

#include "lidarsim/image.hpp"

namespace lidarsim {

/// Nearest-neighbor resize: output pixel (r, c) reads source pixel
/// (floor((r + 0.5) * H / h), floor((c + 0.5) * W / w)). Used for id maps,
/// which must never blend.
template <typename T>
Image<T> resize_nearest(const Image<T>& src, int width, int height) {
  Image<T> out(width, height);
  if (src.empty()) return out;
  for (int r = 0; r < height; ++r) {
    const int sr = std::min(
        static_cast<int>((static_cast<long long>(2 * r + 1) * src.height()) / (2LL * height)),
        src.height() - 1);
    for (int c = 0; c < width; ++c) {
      const int sc = std::min(
          static_cast<int>((static_cast<long long>(2 * c + 1) * src.width()) / (2LL * width)),
          src.width() - 1);
      out.at(r, c) = src.at(sr, sc);
    }
  }
  return out;
}

/// Exact area-weighted average (pixel footprints are intersected with the
/// output footprint). Channels are rounded to the nearest integer.
RgbImage resize_area(const RgbImage& src, int width, int height);

/// Area-weighted average over valid (non-zero) depth only; a cell with no
/// valid coverage stays 0.
DepthImage resize_area_depth(const DepthImage& src, int width, int height);

}  // namespace lidarsim
