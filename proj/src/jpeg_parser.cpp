#include "dda/jpeg_parser.hpp"

#include <string>

#include "dda/error.hpp"
#include "jpeg_internal.hpp"

namespace dda::jpeg {

namespace detail {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::kMalformedStream, what); }

constexpr std::uint8_t kDcValues[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};

constexpr std::uint8_t kAcLumaValues[162] = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07, 0x22, 0x71,
    0x14, 0x32, 0x81, 0x91, 0xA1, 0x08, 0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0, 0x24, 0x33, 0x62, 0x72,
    0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x34, 0x35, 0x36, 0x37,
    0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x83,
    0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3,
    0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3,
    0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
    0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA};

constexpr std::uint8_t kAcChromaValues[162] = {
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61, 0x71, 0x13, 0x22,
    0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0, 0x15, 0x62, 0x72, 0xD1,
    0x0A, 0x16, 0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17, 0x18, 0x19, 0x1A, 0x26, 0x27, 0x28, 0x29, 0x2A, 0x35, 0x36,
    0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
    0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7A,
    0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A,
    0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA,
    0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA,
    0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF2, 0xF3, 0xF4, 0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA};

}  // namespace

const HuffmanSpec& standard_dc_luma() {
  static const HuffmanSpec spec{{0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0}, kDcValues};
  return spec;
}

const HuffmanSpec& standard_ac_luma() {
  static const HuffmanSpec spec{{0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 125}, kAcLumaValues};
  return spec;
}

const HuffmanSpec& standard_dc_chroma() {
  static const HuffmanSpec spec{{0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0}, kDcValues};
  return spec;
}

const HuffmanSpec& standard_ac_chroma() {
  static const HuffmanSpec spec{{0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 119}, kAcChromaValues};
  return spec;
}

FrameHeader parse_frame_header(std::uint16_t marker, std::span<const std::uint8_t> payload) {
  if (payload.size() < 6) malformed("SOF segment too short");
  FrameHeader frame;
  frame.marker = marker;
  frame.precision = payload[0];
  frame.height = read_be16(payload, 1);
  frame.width = read_be16(payload, 3);
  const int count = payload[5];
  if (frame.precision != 8 && frame.precision != 12 && frame.precision != 16) {
    malformed("invalid sample precision " + std::to_string(frame.precision));
  }
  if (frame.height == 0 || frame.width == 0) malformed("SOF declares a zero dimension");
  if (count < 1 || count > 4) malformed("SOF declares " + std::to_string(count) + " components");
  if (payload.size() != 6 + 3 * static_cast<std::size_t>(count)) malformed("SOF length does not match component count");
  for (int i = 0; i < count; ++i) {
    const std::size_t at = 6 + 3 * static_cast<std::size_t>(i);
    FrameComponent component;
    component.id = payload[at];
    component.h_sampling = payload[at + 1] >> 4;
    component.v_sampling = payload[at + 1] & 0x0F;
    component.quant_table = payload[at + 2];
    if (component.h_sampling < 1 || component.h_sampling > 4 || component.v_sampling < 1 ||
        component.v_sampling > 4) {
      malformed("invalid sampling factors");
    }
    if (component.quant_table > 3) malformed("quantization table id out of range");
    for (const auto& other : frame.components) {
      if (other.id == component.id) malformed("duplicate component id");
    }
    frame.components.push_back(component);
  }
  return frame;
}

void parse_dqt(std::span<const std::uint8_t> payload, QuantSlots& slots) {
  if (payload.empty()) malformed("empty DQT segment");
  std::size_t pos = 0;
  while (pos < payload.size()) {
    const int precision = payload[pos] >> 4;
    const int id = payload[pos] & 0x0F;
    ++pos;
    if (precision > 1) malformed("invalid DQT precision " + std::to_string(precision));
    if (id > 3) malformed("invalid DQT table id " + std::to_string(id));
    const std::size_t entry_size = precision == 0 ? 1 : 2;
    if (payload.size() - pos < entry_size * kBlockSize) malformed("DQT table truncated");
    QuantTable table;
    table.sixteen_bit = precision == 1;
    for (int k = 0; k < kBlockSize; ++k) {
      table.zigzag[k] = entry_size == 1 ? payload[pos] : read_be16(payload, pos);
      if (table.zigzag[k] == 0) malformed("DQT entry of zero");
      pos += entry_size;
    }
    slots[id] = table;
  }
}

}  // namespace detail

using detail::malformed;

bool is_jpeg(std::span<const std::uint8_t> bytes) noexcept {
  try {
    return parse_jpeg_segments(bytes).frame.has_value();
  } catch (...) {
    return false;
  }
}

JpegSegmentList parse_jpeg_segments(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 0xFF || bytes[1] != 0xD8) malformed("stream does not start with SOI");
  JpegSegmentList list;
  list.segments.push_back({kMarkerSoi, 0, 0});
  std::size_t pos = 2;
  for (;;) {
    if (pos >= bytes.size()) malformed("stream ended before SOS");
    if (bytes[pos] != 0xFF) malformed("expected marker at offset " + std::to_string(pos));
    while (pos < bytes.size() && bytes[pos] == 0xFF) ++pos;  // fill bytes
    if (pos >= bytes.size()) malformed("stream ended inside marker fill");
    const std::uint8_t code = bytes[pos++];
    const std::uint16_t marker = 0xFF00 | code;
    const std::size_t offset = pos - 2;
    if (code == 0x00) malformed("stuffed zero outside entropy-coded data");
    if (code == 0xD8) malformed("repeated SOI");
    if (detail::is_standalone_code(code)) {
      list.segments.push_back({marker, offset, 0});
      if (marker == kMarkerEoi) break;
      continue;
    }
    if (bytes.size() - pos < 2) malformed("segment length truncated");
    const std::size_t length = detail::read_be16(bytes, pos);
    if (length < 2) malformed("segment length below 2");
    if (length > bytes.size() - pos) malformed("segment length exceeds remaining bytes");
    const auto payload = bytes.subspan(pos + 2, length - 2);
    if (detail::is_sof_code(code)) {
      if (list.frame) malformed("multiple SOF segments");
      list.frame = detail::parse_frame_header(marker, payload);
    }
    list.segments.push_back({marker, offset, length - 2});
    pos += length;
    if (marker == kMarkerSos) break;
  }
  return list;
}

QuantTables extract_quant_tables(std::span<const std::uint8_t> bytes) {
  const JpegSegmentList list = parse_jpeg_segments(bytes);
  detail::QuantSlots slots;
  bool any = false;
  for (const Segment& segment : list.segments) {
    if (segment.marker != kMarkerDqt) continue;
    detail::parse_dqt(bytes.subspan(segment.offset + 4, segment.payload_length), slots);
    any = true;
  }
  if (!any) throw Error(ErrorCode::kMissingTables, "no DQT segment before SOS");

  int luma_id = 0;
  std::optional<int> chroma_id;
  if (list.frame) {
    const auto& components = list.frame->components;
    luma_id = components[0].quant_table;
    if (components.size() >= 2 && components[1].quant_table != luma_id) chroma_id = components[1].quant_table;
  } else if (slots[1]) {
    chroma_id = 1;
  }
  if (!slots[luma_id]) throw Error(ErrorCode::kMissingTables, "luma table " + std::to_string(luma_id) + " not defined");
  QuantTables tables{*slots[luma_id], std::nullopt};
  if (chroma_id) {
    if (!slots[*chroma_id]) {
      throw Error(ErrorCode::kMissingTables, "chroma table " + std::to_string(*chroma_id) + " not defined");
    }
    tables.chroma = slots[*chroma_id];
  }
  return tables;
}

}  // namespace dda::jpeg
