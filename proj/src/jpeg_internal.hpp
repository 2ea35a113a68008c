#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "dda/jpeg_parser.hpp"
#include "dda/jpeg_tables.hpp"

namespace dda::jpeg::detail {

using QuantSlots = std::array<std::optional<QuantTable>, 4>;

inline std::uint16_t read_be16(std::span<const std::uint8_t> bytes, std::size_t pos) {
  return static_cast<std::uint16_t>((bytes[pos] << 8) | bytes[pos + 1]);
}

/// SOF0..SOF15 minus DHT (C4), JPG (C8) and DAC (CC).
inline bool is_sof_code(std::uint8_t code) {
  return code >= 0xC0 && code <= 0xCF && code != 0xC4 && code != 0xC8 && code != 0xCC;
}

/// Markers that carry no length field.
inline bool is_standalone_code(std::uint8_t code) {
  return code == 0x01 || (code >= 0xD0 && code <= 0xD9);
}

FrameHeader parse_frame_header(std::uint16_t marker, std::span<const std::uint8_t> payload);
void parse_dqt(std::span<const std::uint8_t> payload, QuantSlots& slots);

// Annex K.3 Huffman specifications.
struct HuffmanSpec {
  std::array<std::uint8_t, 16> counts;
  std::span<const std::uint8_t> values;
};

const HuffmanSpec& standard_dc_luma();
const HuffmanSpec& standard_ac_luma();
const HuffmanSpec& standard_dc_chroma();
const HuffmanSpec& standard_ac_chroma();

/// Orthonormal 8-point DCT-II basis, basis[u * 8 + x] = c(u) cos((2x + 1) u pi / 16).
const std::array<double, 64>& dct8_basis();

}  // namespace dda::jpeg::detail
