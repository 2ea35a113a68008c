#include "dda/image_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>

#include "dda/error.hpp"
#include "dda/jpeg_codec.hpp"
#include "dda/jpeg_parser.hpp"

namespace dda {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorCode::kMissingFile, "no such file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

bool is_png(std::span<const std::uint8_t> bytes) noexcept {
  static constexpr std::uint8_t kMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kMagic, 8) == 0;
}

namespace {

// libpng reports errors through this callback; the exception unwinds out of
// the library and the guard below releases its structures.
[[noreturn]] void png_error_handler(png_structp, png_const_charp message) {
  throw Error(ErrorCode::kMalformedStream, std::string("png: ") + message);
}

void png_warning_handler(png_structp, png_const_charp) {}

struct ReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~ReadGuard() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct WriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~WriteGuard() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

struct MemoryReader {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;
};

void read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->data.size() - reader->pos < length) png_error(png, "unexpected end of data");
  std::memcpy(out, reader->data.data() + reader->pos, length);
  reader->pos += length;
}

void write_callback(png_structp png, png_bytep in, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), in, in + length);
}

void flush_callback(png_structp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const ImageBuffer& image) {
  const std::vector<std::uint8_t> pixels = image.to_u8();
  std::vector<std::uint8_t> out;
  WriteGuard guard;
  guard.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler, png_warning_handler);
  if (!guard.png) throw Error(ErrorCode::kIo, "png_create_write_struct failed");
  guard.info = png_create_info_struct(guard.png);
  if (!guard.info) throw Error(ErrorCode::kIo, "png_create_info_struct failed");
  png_set_write_fn(guard.png, &out, write_callback, flush_callback);
  png_set_compression_level(guard.png, 6);
  png_set_IHDR(guard.png, guard.info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()),
               8, image.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(guard.png, guard.info);
  const std::size_t stride = std::size_t(image.width()) * image.channels();
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(guard.png, const_cast<png_bytep>(pixels.data() + std::size_t(y) * stride));
  }
  png_write_end(guard.png, nullptr);
  return out;
}

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
  if (!is_png(bytes)) throw Error(ErrorCode::kMalformedStream, "missing PNG signature");
  ReadGuard guard;
  guard.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler, png_warning_handler);
  if (!guard.png) throw Error(ErrorCode::kIo, "png_create_read_struct failed");
  guard.info = png_create_info_struct(guard.png);
  if (!guard.info) throw Error(ErrorCode::kIo, "png_create_info_struct failed");
  MemoryReader reader{bytes, 0};
  png_set_read_fn(guard.png, &reader, read_callback);
  png_set_user_limits(guard.png, 1U << 16, 1U << 16);
  png_read_info(guard.png, guard.info);

  png_set_expand(guard.png);
  png_set_scale_16(guard.png);
  png_set_strip_alpha(guard.png);
  png_set_interlace_handling(guard.png);
  png_read_update_info(guard.png, guard.info);

  const int width = static_cast<int>(png_get_image_width(guard.png, guard.info));
  const int height = static_cast<int>(png_get_image_height(guard.png, guard.info));
  const int channels = png_get_channels(guard.png, guard.info);
  if (channels != 1 && channels != 3) throw Error(ErrorCode::kUnsupportedMode, "unexpected PNG channel layout");
  const std::size_t stride = png_get_rowbytes(guard.png, guard.info);
  std::vector<std::uint8_t> pixels(stride * height);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = pixels.data() + std::size_t(y) * stride;
  png_read_image(guard.png, rows.data());
  png_read_end(guard.png, nullptr);
  return ImageBuffer::from_u8(height, width, channels, pixels);
}

ImageBuffer decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) {
    return jpeg::decode_jpeg(bytes, jpeg::DecodeColor::kNative);
  }
  throw Error(ErrorCode::kMalformedStream, "unrecognized image format");
}

ImageBuffer load_image(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void save_png(const fs::path& path, const ImageBuffer& image) { write_file(path, encode_png(image)); }

}  // namespace dda
