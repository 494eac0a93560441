#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lidarsim/image.hpp"

namespace lidarsim::png {

/// Decoded PNG samples, interleaved per pixel. Palette images keep their
/// raw indices (channels == 1, palette == true) so indexed segmentation
/// maps decode to ids rather than colors.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 1;
  int bit_depth = 8;
  bool palette = false;
  std::vector<std::uint16_t> samples;
};

Raster decode(std::span<const std::byte> bytes);

/// Writes gray (1), gray+alpha (2), RGB (3) or RGBA (4) at bit depth 8 or 16.
std::vector<std::byte> encode(const Raster& raster);

std::vector<std::byte> encode_gray16(const Image<std::uint16_t>& image);
std::vector<std::byte> encode_gray8(const Image<std::uint8_t>& image);
std::vector<std::byte> encode_rgb8(const RgbImage& image);

Image<std::uint16_t> decode_gray16(std::span<const std::byte> bytes);
/// Accepts 8-bit gray or palette images.
Image<std::uint8_t> decode_gray8(std::span<const std::byte> bytes);
/// Accepts 8-bit RGB or RGBA (alpha dropped).
RgbImage decode_rgb8(std::span<const std::byte> bytes);

}  // namespace lidarsim::png
