#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace dda::jpeg {

inline constexpr int kBlockSize = 64;

/// kZigzagToNatural[k] is the row-major (natural) index of the k-th
/// coefficient in zigzag scan order.
inline constexpr std::array<std::uint8_t, kBlockSize> kZigzagToNatural = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

/// Annex K luminance table, natural order.
inline constexpr std::array<std::uint16_t, kBlockSize> kStandardLuma = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

/// Annex K chrominance table, natural order.
inline constexpr std::array<std::uint16_t, kBlockSize> kStandardChroma = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

/// One 64-entry quantization table. Entries are stored in zigzag order,
/// exactly as they appear in a DQT segment; natural() de-zigzags them into
/// row-major order (index = row * 8 + col).
struct QuantTable {
  std::array<std::uint16_t, kBlockSize> zigzag{};
  bool sixteen_bit = false;

  std::array<std::uint16_t, kBlockSize> natural() const;
  static QuantTable from_natural(const std::array<std::uint16_t, kBlockSize>& natural, bool sixteen_bit = false);

  /// Every entry in [1,255] (8-bit) or [1,65535] (16-bit).
  bool valid() const;

  friend bool operator==(const QuantTable&, const QuantTable&) = default;
};

struct QuantTables {
  QuantTable luma;
  std::optional<QuantTable> chroma;

  bool valid() const { return luma.valid() && (!chroma || chroma->valid()); }

  friend bool operator==(const QuantTables&, const QuantTables&) = default;
};

struct QualityEstimate {
  int quality = 0;
  std::uint64_t distance = 0;
  bool exact = false;

  friend bool operator==(const QualityEstimate&, const QualityEstimate&) = default;
};

/// IJG scaling of the Annex K tables: scale = 5000/q for q < 50 (integer
/// division), 200 - 2q otherwise; entry = clamp((base * scale + 50) / 100, 1, 255).
/// Throws OutOfRange outside [1,100].
QuantTables scale_standard_tables(int quality);

/// Nearest IJG quality under L1 distance over every table present in
/// `tables`; ties go to the highest quality.
QualityEstimate estimate_quality(const QuantTables& tables);

}  // namespace dda::jpeg
