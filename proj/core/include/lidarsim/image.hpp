#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lidarsim/error.hpp"

namespace lidarsim {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major dense raster. Indexing is (row, col); row 0 is the top.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(checked_size(width, height), fill) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int row, int col) { return data_[index(row, col)]; }
  const T& at(int row, int col) const { return data_[index(row, col)]; }

  bool contains(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  bool same_shape(const auto& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 0 || height < 0) {
      throw Error(ErrorCode::kShape, "negative image dimensions");
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Depth in meters; 0 marks an invalid pixel.
using DepthImage = Image<float>;
/// Reflectivity in [0,1].
using IntensityImage = Image<float>;
/// Class or instance ids.
using IdImage = Image<std::int32_t>;
using RgbImage = Image<Rgb>;
using MaskImage = Image<std::uint8_t>;

template <typename T, typename U>
void require_same_shape(const Image<T>& a, const Image<U>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::kShape, std::string(what) + ": layer dimensions differ");
  }
}

}  // namespace lidarsim
