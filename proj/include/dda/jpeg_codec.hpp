#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dda/image.hpp"

namespace dda::jpeg {

enum class ChromaSubsampling { k420, k444 };

std::string_view subsampling_name(ChromaSubsampling subsampling);
/// Accepts "420"/"4:2:0" and "444"/"4:4:4"; throws OutOfRange otherwise.
ChromaSubsampling parse_subsampling(std::string_view text);

/// Baseline sequential JPEG with the Annex K Huffman tables and the IJG
/// quality-scaled Annex K quantization tables (luma id 0, chroma id 1).
/// Samples are rounded to 8 bits before encoding. Single-channel images are
/// written as grayscale streams. Throws OutOfRange (quality) or TooSmall
/// (either side below 8).
std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& image, int quality,
                                      ChromaSubsampling subsampling = ChromaSubsampling::k420);

enum class DecodeColor {
  kRgb,     ///< always three channels; grayscale is replicated
  kNative,  ///< one channel for grayscale streams, three otherwise
};

/// Decodes baseline (SOF0) and extended-sequential 8-bit Huffman (SOF1)
/// streams with any sampling factors, restart intervals and non-interleaved
/// scans. Progressive, arithmetic, lossless and 12-bit streams raise
/// UnsupportedMode; corrupt data raises MalformedStream. Chroma is
/// upsampled bilinearly with centered sample positions.
ImageBuffer decode_jpeg(std::span<const std::uint8_t> bytes, DecodeColor color = DecodeColor::kRgb);

}  // namespace dda::jpeg
