#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dda/jpeg_tables.hpp"

namespace dda::jpeg {

inline constexpr std::uint16_t kMarkerSoi = 0xFFD8;
inline constexpr std::uint16_t kMarkerEoi = 0xFFD9;
inline constexpr std::uint16_t kMarkerSos = 0xFFDA;
inline constexpr std::uint16_t kMarkerDqt = 0xFFDB;
inline constexpr std::uint16_t kMarkerDht = 0xFFC4;
inline constexpr std::uint16_t kMarkerDri = 0xFFDD;
inline constexpr std::uint16_t kMarkerSof0 = 0xFFC0;
inline constexpr std::uint16_t kMarkerSof1 = 0xFFC1;
inline constexpr std::uint16_t kMarkerSof2 = 0xFFC2;

/// One marker segment. `offset` is the index of the 0xFF byte that
/// introduces the marker; `payload_length` counts the bytes after the
/// 2-byte length field (0 for SOI/EOI and other standalone markers).
struct Segment {
  std::uint16_t marker = 0;
  std::size_t offset = 0;
  std::size_t payload_length = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct FrameComponent {
  int id = 0;
  int h_sampling = 1;
  int v_sampling = 1;
  int quant_table = 0;
};

struct FrameHeader {
  std::uint16_t marker = 0;
  int precision = 8;
  int height = 0;
  int width = 0;
  std::vector<FrameComponent> components;

  bool baseline_huffman() const { return marker == kMarkerSof0 || marker == kMarkerSof1; }
};

struct JpegSegmentList {
  std::vector<Segment> segments;
  std::optional<FrameHeader> frame;
};

/// True iff the stream starts with SOI and a well-formed SOF segment can be
/// parsed before SOS. Never throws.
bool is_jpeg(std::span<const std::uint8_t> bytes) noexcept;

/// Walks the marker segments from SOI through SOS (inclusive) or an early
/// EOI. Entropy-coded data is not touched. Throws MalformedStream on any
/// truncation or inconsistency; never reads past the buffer.
JpegSegmentList parse_jpeg_segments(std::span<const std::uint8_t> bytes);

/// Collects every DQT table defined before SOS (a later definition of the
/// same table id replaces an earlier one). `luma` is the table referenced by
/// the first frame component, `chroma` the one referenced by the second
/// component when it differs. Throws MalformedStream or MissingTables.
QuantTables extract_quant_tables(std::span<const std::uint8_t> bytes);

}  // namespace dda::jpeg
