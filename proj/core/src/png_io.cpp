#include "lidarsim/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <string>

#include "lidarsim/error.hpp"

namespace lidarsim::png {
namespace {

struct ErrorSink {
  std::string message;
};

void on_error(png_structp png_ptr, png_const_charp message) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png_ptr));
  sink->message = message ? message : "libpng error";
  png_longjmp(png_ptr, 1);
}

void on_warning(png_structp, png_const_charp) {}

struct ReadCursor {
  std::span<const std::byte> bytes;
  std::size_t offset = 0;
};

void read_from_span(png_structp png_ptr, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png_ptr));
  if (cursor->offset + length > cursor->bytes.size()) {
    png_error(png_ptr, "unexpected end of PNG data");
  }
  std::memcpy(out, cursor->bytes.data() + cursor->offset, length);
  cursor->offset += length;
}

void write_to_vector(png_structp png_ptr, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::byte>*>(png_get_io_ptr(png_ptr));
  const auto* first = reinterpret_cast<const std::byte*>(data);
  out->insert(out->end(), first, first + length);
}

void flush_noop(png_structp) {}

int color_type_for(int channels) {
  switch (channels) {
    case 1: return PNG_COLOR_TYPE_GRAY;
    case 2: return PNG_COLOR_TYPE_GRAY_ALPHA;
    case 3: return PNG_COLOR_TYPE_RGB;
    case 4: return PNG_COLOR_TYPE_RGB_ALPHA;
    default: return -1;
  }
}

// libpng reports errors through longjmp; everything with a destructor lives
// in the caller so nothing is skipped when the jump lands.
bool decode_into(std::span<const std::byte> bytes, Raster& raster, std::vector<png_bytep>& rows,
                 std::vector<png_byte>& buffer, ErrorSink& sink) {
  png_structp png_ptr = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, on_error, on_warning);
  if (png_ptr == nullptr) {
    sink.message = "png_create_read_struct failed";
    return false;
  }
  png_infop info_ptr = png_create_info_struct(png_ptr);
  if (info_ptr == nullptr) {
    png_destroy_read_struct(&png_ptr, nullptr, nullptr);
    sink.message = "png_create_info_struct failed";
    return false;
  }
  ReadCursor cursor{bytes, 0};
  if (setjmp(png_jmpbuf(png_ptr))) {
    png_destroy_read_struct(&png_ptr, &info_ptr, nullptr);
    return false;
  }
  png_set_read_fn(png_ptr, &cursor, read_from_span);
  png_read_info(png_ptr, info_ptr);

  const int color_type = png_get_color_type(png_ptr, info_ptr);
  const int bit_depth = png_get_bit_depth(png_ptr, info_ptr);
  if (bit_depth < 8) {
    if (color_type == PNG_COLOR_TYPE_GRAY) {
      png_set_expand_gray_1_2_4_to_8(png_ptr);
    } else {
      png_set_packing(png_ptr);
    }
  }
  png_read_update_info(png_ptr, info_ptr);

  raster.width = static_cast<int>(png_get_image_width(png_ptr, info_ptr));
  raster.height = static_cast<int>(png_get_image_height(png_ptr, info_ptr));
  raster.channels = png_get_channels(png_ptr, info_ptr);
  raster.bit_depth = png_get_bit_depth(png_ptr, info_ptr);
  raster.palette = color_type == PNG_COLOR_TYPE_PALETTE;

  const std::size_t row_bytes = png_get_rowbytes(png_ptr, info_ptr);
  buffer.resize(row_bytes * static_cast<std::size_t>(raster.height));
  rows.resize(static_cast<std::size_t>(raster.height));
  for (int r = 0; r < raster.height; ++r) {
    rows[static_cast<std::size_t>(r)] = buffer.data() + row_bytes * static_cast<std::size_t>(r);
  }
  png_read_image(png_ptr, rows.data());
  png_read_end(png_ptr, nullptr);
  png_destroy_read_struct(&png_ptr, &info_ptr, nullptr);
  return true;
}

bool encode_into(const Raster& raster, std::vector<std::byte>& out, std::vector<png_bytep>& rows,
                 ErrorSink& sink) {
  png_structp png_ptr =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, on_error, on_warning);
  if (png_ptr == nullptr) {
    sink.message = "png_create_write_struct failed";
    return false;
  }
  png_infop info_ptr = png_create_info_struct(png_ptr);
  if (info_ptr == nullptr) {
    png_destroy_write_struct(&png_ptr, nullptr);
    sink.message = "png_create_info_struct failed";
    return false;
  }
  if (setjmp(png_jmpbuf(png_ptr))) {
    png_destroy_write_struct(&png_ptr, &info_ptr);
    return false;
  }
  png_set_write_fn(png_ptr, &out, write_to_vector, flush_noop);
  png_set_IHDR(png_ptr, info_ptr, static_cast<png_uint_32>(raster.width),
               static_cast<png_uint_32>(raster.height), raster.bit_depth,
               color_type_for(raster.channels), PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png_ptr, info_ptr);
  png_write_image(png_ptr, rows.data());
  png_write_end(png_ptr, nullptr);
  png_destroy_write_struct(&png_ptr, &info_ptr);
  return true;
}

}  // namespace

Raster decode(std::span<const std::byte> bytes) {
  if (bytes.size() < 8 ||
      png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    throw Error(ErrorCode::kUnsupportedFormat, "not a PNG stream");
  }
  Raster raster;
  std::vector<png_bytep> rows;
  std::vector<png_byte> buffer;
  ErrorSink sink;
  if (!decode_into(bytes, raster, rows, buffer, sink)) {
    throw Error(ErrorCode::kMalformedFile, "PNG decode failed: " + sink.message);
  }
  const std::size_t count = static_cast<std::size_t>(raster.width) *
                            static_cast<std::size_t>(raster.height) *
                            static_cast<std::size_t>(raster.channels);
  raster.samples.resize(count);
  if (raster.bit_depth == 16) {
    for (std::size_t i = 0; i < count; ++i) {
      raster.samples[i] = static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) raster.samples[i] = buffer[i];
  }
  return raster;
}

std::vector<std::byte> encode(const Raster& raster) {
  if (color_type_for(raster.channels) < 0 || (raster.bit_depth != 8 && raster.bit_depth != 16)) {
    throw Error(ErrorCode::kUnsupportedFormat, "unsupported PNG channel count or bit depth");
  }
  if (raster.width <= 0 || raster.height <= 0) {
    throw Error(ErrorCode::kShape, "PNG images must be non-empty");
  }
  const std::size_t count = static_cast<std::size_t>(raster.width) *
                            static_cast<std::size_t>(raster.height) *
                            static_cast<std::size_t>(raster.channels);
  if (raster.samples.size() != count) {
    throw Error(ErrorCode::kShape, "sample count does not match PNG dimensions");
  }
  const std::size_t bytes_per_sample = raster.bit_depth == 16 ? 2 : 1;
  std::vector<png_byte> buffer(count * bytes_per_sample);
  for (std::size_t i = 0; i < count; ++i) {
    if (bytes_per_sample == 2) {
      buffer[2 * i] = static_cast<png_byte>(raster.samples[i] >> 8);
      buffer[2 * i + 1] = static_cast<png_byte>(raster.samples[i] & 0xFF);
    } else {
      buffer[i] = static_cast<png_byte>(raster.samples[i]);
    }
  }
  const std::size_t row_bytes =
      static_cast<std::size_t>(raster.width) * static_cast<std::size_t>(raster.channels) *
      bytes_per_sample;
  std::vector<png_bytep> rows(static_cast<std::size_t>(raster.height));
  for (int r = 0; r < raster.height; ++r) {
    rows[static_cast<std::size_t>(r)] = buffer.data() + row_bytes * static_cast<std::size_t>(r);
  }
  std::vector<std::byte> out;
  ErrorSink sink;
  if (!encode_into(raster, out, rows, sink)) {
    throw Error(ErrorCode::kIo, "PNG encode failed: " + sink.message);
  }
  return out;
}

std::vector<std::byte> encode_gray16(const Image<std::uint16_t>& image) {
  Raster raster{image.width(), image.height(), 1, 16, false, {}};
  raster.samples.assign(image.pixels().begin(), image.pixels().end());
  return encode(raster);
}

std::vector<std::byte> encode_gray8(const Image<std::uint8_t>& image) {
  Raster raster{image.width(), image.height(), 1, 8, false, {}};
  raster.samples.assign(image.pixels().begin(), image.pixels().end());
  return encode(raster);
}

std::vector<std::byte> encode_rgb8(const RgbImage& image) {
  Raster raster{image.width(), image.height(), 3, 8, false, {}};
  raster.samples.reserve(image.size() * 3);
  for (const Rgb& px : image.pixels()) {
    raster.samples.push_back(px.r);
    raster.samples.push_back(px.g);
    raster.samples.push_back(px.b);
  }
  return encode(raster);
}

Image<std::uint16_t> decode_gray16(std::span<const std::byte> bytes) {
  const Raster raster = decode(bytes);
  if (raster.bit_depth != 16 || raster.channels != 1 || raster.palette) {
    throw Error(ErrorCode::kUnsupportedFormat, "expected a 16-bit single-channel PNG");
  }
  Image<std::uint16_t> image(raster.width, raster.height);
  std::copy(raster.samples.begin(), raster.samples.end(), image.pixels().begin());
  return image;
}

Image<std::uint8_t> decode_gray8(std::span<const std::byte> bytes) {
  const Raster raster = decode(bytes);
  if (raster.bit_depth != 8 || raster.channels != 1) {
    throw Error(ErrorCode::kUnsupportedFormat, "expected an 8-bit gray or palette PNG");
  }
  Image<std::uint8_t> image(raster.width, raster.height);
  for (std::size_t i = 0; i < raster.samples.size(); ++i) {
    image.pixels()[i] = static_cast<std::uint8_t>(raster.samples[i]);
  }
  return image;
}

RgbImage decode_rgb8(std::span<const std::byte> bytes) {
  const Raster raster = decode(bytes);
  if (raster.bit_depth != 8 || (raster.channels != 3 && raster.channels != 4) || raster.palette) {
    throw Error(ErrorCode::kUnsupportedFormat, "expected an 8-bit RGB PNG");
  }
  RgbImage image(raster.width, raster.height);
  const auto stride = static_cast<std::size_t>(raster.channels);
  for (std::size_t i = 0; i < image.size(); ++i) {
    image.pixels()[i] = Rgb{static_cast<std::uint8_t>(raster.samples[i * stride]),
                            static_cast<std::uint8_t>(raster.samples[i * stride + 1]),
                            static_cast<std::uint8_t>(raster.samples[i * stride + 2])};
  }
  return image;
}

}  // namespace lidarsim::png
