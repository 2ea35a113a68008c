#include "dda/jpeg_tables.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "dda/error.hpp"

namespace dda::jpeg {

std::array<std::uint16_t, kBlockSize> QuantTable::natural() const {
  std::array<std::uint16_t, kBlockSize> out{};
  for (int k = 0; k < kBlockSize; ++k) out[kZigzagToNatural[k]] = zigzag[k];
  return out;
}

QuantTable QuantTable::from_natural(const std::array<std::uint16_t, kBlockSize>& natural, bool sixteen_bit) {
  QuantTable table;
  table.sixteen_bit = sixteen_bit;
  for (int k = 0; k < kBlockSize; ++k) table.zigzag[k] = natural[kZigzagToNatural[k]];
  return table;
}

bool QuantTable::valid() const {
  const std::uint16_t upper = sixteen_bit ? 65535 : 255;
  return std::all_of(zigzag.begin(), zigzag.end(), [upper](std::uint16_t v) { return v >= 1 && v <= upper; });
}

namespace {

QuantTable scale_table(const std::array<std::uint16_t, kBlockSize>& base, int scale) {
  std::array<std::uint16_t, kBlockSize> scaled{};
  for (int i = 0; i < kBlockSize; ++i) {
    const long value = (static_cast<long>(base[i]) * scale + 50) / 100;
    scaled[i] = static_cast<std::uint16_t>(std::clamp(value, 1L, 255L));
  }
  return QuantTable::from_natural(scaled);
}

std::uint64_t l1_distance(const QuantTable& observed, const QuantTable& reference) {
  std::uint64_t sum = 0;
  for (int k = 0; k < kBlockSize; ++k) {
    sum += static_cast<std::uint64_t>(std::abs(int(observed.zigzag[k]) - int(reference.zigzag[k])));
  }
  return sum;
}

}  // namespace

QuantTables scale_standard_tables(int quality) {
  if (quality < 1 || quality > 100) {
    throw Error(ErrorCode::kOutOfRange, "quality must be in [1,100], got " + std::to_string(quality));
  }
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  return QuantTables{scale_table(kStandardLuma, scale), scale_table(kStandardChroma, scale)};
}

QualityEstimate estimate_quality(const QuantTables& tables) {
  QualityEstimate best{0, 0, false};
  bool have_best = false;
  // Ascending scan with `<=` lets the highest quality win ties.
  for (int q = 1; q <= 100; ++q) {
    const QuantTables reference = scale_standard_tables(q);
    std::uint64_t distance = l1_distance(tables.luma, reference.luma);
    if (tables.chroma) distance += l1_distance(*tables.chroma, *reference.chroma);
    if (!have_best || distance <= best.distance) {
      best.quality = q;
      best.distance = distance;
      have_best = true;
    }
  }
  best.exact = best.distance == 0;
  return best;
}

}  // namespace dda::jpeg
