#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dda/image.hpp"

namespace dda {

/// Throws MissingFile when the path does not exist, Io on read failure.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

bool is_png(std::span<const std::uint8_t> bytes) noexcept;

/// 8-bit PNG with 1 (gray) or 3 (RGB) channels. Samples are rounded half
/// away from zero and clamped. Output bytes are a pure function of the pixels.
std::vector<std::uint8_t> encode_png(const ImageBuffer& image);

/// Accepts any PNG colour type/bit depth; alpha is dropped, palettes are
/// expanded, 16-bit samples are reduced to 8 bits. Gray stays one channel.
ImageBuffer decode_png(std::span<const std::uint8_t> bytes);

/// Dispatches on magic bytes to the JPEG or PNG decoder. Grayscale sources
/// keep a single channel. Throws MalformedStream for unknown formats.
ImageBuffer decode_image(std::span<const std::uint8_t> bytes);

ImageBuffer load_image(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const ImageBuffer& image);

}  // namespace dda
