#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "dda/error.hpp"
#include "dda/jpeg_codec.hpp"
#include "dda/jpeg_parser.hpp"
#include "jpeg_internal.hpp"

namespace dda::jpeg {

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::kMalformedStream, what); }
[[noreturn]] void unsupported(const std::string& what) { throw Error(ErrorCode::kUnsupportedMode, what); }

// Hard ceiling on decoded raster size.
constexpr std::size_t kMaxPixels = std::size_t(1) << 28;

/// Canonical Huffman decoding table (ITU-T T.81 F.2.2.3).
struct HuffmanTable {
  std::array<std::int32_t, 18> max_code{};
  std::array<std::int32_t, 17> value_offset{};
  std::array<std::int32_t, 17> min_code{};
  std::vector<std::uint8_t> values;
};

HuffmanTable build_huffman(const std::array<std::uint8_t, 16>& counts, std::span<const std::uint8_t> values) {
  HuffmanTable table;
  table.values.assign(values.begin(), values.end());
  std::int32_t code = 0;
  std::int32_t k = 0;
  for (int length = 1; length <= 16; ++length) {
    const int n = counts[length - 1];
    if (n == 0) {
      table.max_code[length] = -1;
    } else {
      table.value_offset[length] = k;
      table.min_code[length] = code;
      code += n;
      k += n;
      table.max_code[length] = code - 1;
    }
    if (code > (1 << length)) malformed("Huffman table is over-subscribed");
    code <<= 1;
  }
  table.max_code[17] = 0x7FFFFFFF;
  return table;
}

class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> data, std::size_t pos) : data_(data), pos_(pos) {}

  int bit() {
    if (count_ == 0) fill();
    --count_;
    return (acc_ >> count_) & 1;
  }

  int bits(int n) {
    int value = 0;
    for (int i = 0; i < n; ++i) value = (value << 1) | bit();
    return value;
  }

  int decode(const HuffmanTable& table) {
    std::int32_t code = bit();
    int length = 1;
    while (code > table.max_code[length]) {
      if (++length > 16) malformed("invalid Huffman code");
      code = (code << 1) | bit();
    }
    const std::int32_t index = table.value_offset[length] + code - table.min_code[length];
    if (index < 0 || static_cast<std::size_t>(index) >= table.values.size()) malformed("Huffman code out of table");
    return table.values[index];
  }

  /// Drops buffered bits and consumes an RSTn marker.
  void restart() {
    count_ = 0;
    if (pos_ >= data_.size() || data_[pos_] != 0xFF) malformed("expected restart marker");
    while (pos_ < data_.size() && data_[pos_] == 0xFF) ++pos_;
    if (pos_ >= data_.size() || data_[pos_] < 0xD0 || data_[pos_] > 0xD7) malformed("expected restart marker");
    ++pos_;
  }

  std::size_t position() const { return pos_; }

 private:
  void fill() {
    if (pos_ >= data_.size()) malformed("entropy-coded data truncated");
    const std::uint8_t byte = data_[pos_];
    if (byte == 0xFF) {
      if (pos_ + 1 >= data_.size()) malformed("entropy-coded data truncated");
      if (data_[pos_ + 1] != 0x00) malformed("entropy-coded data ran into a marker");
      pos_ += 2;
    } else {
      ++pos_;
    }
    acc_ = byte;
    count_ = 8;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_;
  std::uint32_t acc_ = 0;
  int count_ = 0;
};

int extend(int value, int size) {
  return size == 0 ? 0 : (value < (1 << (size - 1)) ? value - (1 << size) + 1 : value);
}

struct ComponentState {
  FrameComponent spec;
  int blocks_w = 0;  // blocks covering the MCU grid
  int blocks_h = 0;
  std::vector<std::int32_t> coefficients;  // dequantized, natural order, 64 per block
  int dc_pred = 0;
  bool seen = false;
};

struct ScanComponent {
  std::size_t index;
  int dc_table;
  int ac_table;
};

class Decoder {
 public:
  explicit Decoder(std::span<const std::uint8_t> data) : data_(data) {}

  ImageBuffer run(DecodeColor color);

 private:
  void read_frame(std::uint16_t marker, std::span<const std::uint8_t> payload);
  void read_dht(std::span<const std::uint8_t> payload);
  std::size_t decode_scan(std::span<const std::uint8_t> payload, std::size_t entropy_start);
  void decode_block(BitReader& reader, ComponentState& comp, const ScanComponent& sc, int bx, int by);
  ImageBuffer assemble(DecodeColor color) const;

  std::span<const std::uint8_t> data_;
  detail::QuantSlots quant_;
  std::array<std::optional<HuffmanTable>, 4> dc_tables_;
  std::array<std::optional<HuffmanTable>, 4> ac_tables_;
  std::optional<FrameHeader> frame_;
  std::vector<ComponentState> components_;
  int max_h_ = 1;
  int max_v_ = 1;
  int mcus_x_ = 0;
  int mcus_y_ = 0;
  int restart_interval_ = 0;
  int adobe_transform_ = -1;
  int scans_ = 0;
};

void Decoder::read_frame(std::uint16_t marker, std::span<const std::uint8_t> payload) {
  if (frame_) malformed("multiple SOF segments");
  FrameHeader frame = detail::parse_frame_header(marker, payload);
  if (!frame.baseline_huffman()) {
    unsupported("only baseline/extended sequential Huffman JPEG is supported (SOF marker 0x" +
                std::to_string(marker & 0xFF) + ")");
  }
  if (frame.precision != 8) unsupported("only 8-bit sample precision is supported");
  if (frame.components.size() != 1 && frame.components.size() != 3) {
    unsupported(std::to_string(frame.components.size()) + "-component streams are not supported");
  }
  if (std::size_t(frame.height) * frame.width > kMaxPixels) unsupported("image exceeds the decoder size limit");
  for (const auto& c : frame.components) {
    max_h_ = std::max(max_h_, c.h_sampling);
    max_v_ = std::max(max_v_, c.v_sampling);
  }
  mcus_x_ = (frame.width + 8 * max_h_ - 1) / (8 * max_h_);
  mcus_y_ = (frame.height + 8 * max_v_ - 1) / (8 * max_v_);
  for (const auto& c : frame.components) {
    ComponentState state;
    state.spec = c;
    state.blocks_w = mcus_x_ * c.h_sampling;
    state.blocks_h = mcus_y_ * c.v_sampling;
    components_.push_back(std::move(state));
  }
  frame_ = std::move(frame);
}

void Decoder::read_dht(std::span<const std::uint8_t> payload) {
  std::size_t pos = 0;
  while (pos < payload.size()) {
    if (payload.size() - pos < 17) malformed("DHT segment truncated");
    const int table_class = payload[pos] >> 4;
    const int id = payload[pos] & 0x0F;
    if (table_class > 1 || id > 3) malformed("invalid DHT class/id");
    std::array<std::uint8_t, 16> counts{};
    std::size_t total = 0;
    for (int i = 0; i < 16; ++i) {
      counts[i] = payload[pos + 1 + i];
      total += counts[i];
    }
    pos += 17;
    if (total > 256 || payload.size() - pos < total) malformed("DHT values truncated");
    auto table = build_huffman(counts, payload.subspan(pos, total));
    pos += total;
    (table_class == 0 ? dc_tables_ : ac_tables_)[id] = std::move(table);
  }
}

void Decoder::decode_block(BitReader& reader, ComponentState& comp, const ScanComponent& sc, int bx, int by) {
  const HuffmanTable& dc = *dc_tables_[sc.dc_table];
  const HuffmanTable& ac = *ac_tables_[sc.ac_table];
  const QuantTable& q = *quant_[comp.spec.quant_table];
  std::int32_t* block = &comp.coefficients[(std::size_t(by) * comp.blocks_w + bx) * 64];

  const int dc_size = reader.decode(dc);
  if (dc_size > 11) malformed("DC magnitude category out of range");
  comp.dc_pred += extend(reader.bits(dc_size), dc_size);
  if (comp.dc_pred > 16384 || comp.dc_pred < -16384) malformed("DC coefficient out of range");
  block[0] = comp.dc_pred * q.zigzag[0];

  for (int k = 1; k < 64;) {
    const int rs = reader.decode(ac);
    const int run = rs >> 4;
    const int size = rs & 0x0F;
    if (size == 0) {
      if (run != 15) break;  // EOB
      k += 16;
      if (k > 64) malformed("zero run past end of block");
      continue;
    }
    if (size > 10) malformed("AC magnitude category out of range");
    k += run;
    if (k > 63) malformed("coefficient index past end of block");
    block[kZigzagToNatural[k]] = extend(reader.bits(size), size) * q.zigzag[k];
    ++k;
  }
}

std::size_t Decoder::decode_scan(std::span<const std::uint8_t> payload, std::size_t entropy_start) {
  if (!frame_) malformed("SOS before SOF");
  if (payload.empty()) malformed("empty SOS segment");
  const int count = payload[0];
  if (count < 1 || count > 4 || payload.size() != 4 + 2 * std::size_t(count)) malformed("SOS length mismatch");
  std::vector<ScanComponent> scan;
  for (int i = 0; i < count; ++i) {
    const int id = payload[1 + 2 * i];
    const int tables = payload[2 + 2 * i];
    auto it = std::find_if(components_.begin(), components_.end(), [id](const ComponentState& c) { return c.spec.id == id; });
    if (it == components_.end()) malformed("SOS references unknown component " + std::to_string(id));
    ScanComponent sc{std::size_t(it - components_.begin()), tables >> 4, tables & 0x0F};
    if (sc.dc_table > 3 || sc.ac_table > 3 || !dc_tables_[sc.dc_table] || !ac_tables_[sc.ac_table]) {
      malformed("SOS references an undefined Huffman table");
    }
    if (!quant_[it->spec.quant_table]) malformed("component references an undefined quantization table");
    for (const auto& other : scan) {
      if (other.index == sc.index) malformed("component repeated in scan");
    }
    scan.push_back(sc);
  }
  const std::size_t tail = 1 + 2 * std::size_t(count);
  if (payload[tail] != 0 || payload[tail + 1] != 63 || payload[tail + 2] != 0) {
    malformed("spectral selection/approximation not valid for a sequential scan");
  }

  const bool interleaved = scan.size() > 1;
  int units_x = mcus_x_;
  int units_y = mcus_y_;
  if (!interleaved) {
    const auto& spec = components_[scan[0].index].spec;
    const int comp_w = (frame_->width * spec.h_sampling + max_h_ - 1) / max_h_;
    const int comp_h = (frame_->height * spec.v_sampling + max_v_ - 1) / max_v_;
    units_x = (comp_w + 7) / 8;
    units_y = (comp_h + 7) / 8;
  }

  // A baseline block costs at least two bits, which bounds the block count by
  // the bytes that remain; this rejects absurd SOF dimensions before allocating.
  std::size_t per_unit = 1;
  if (interleaved) {
    per_unit = 0;
    for (const auto& sc : scan) {
      per_unit += std::size_t(components_[sc.index].spec.h_sampling) * components_[sc.index].spec.v_sampling;
    }
  }
  if (std::size_t(units_x) * units_y * per_unit > 4 * (data_.size() - entropy_start) + 16) {
    malformed("frame dimensions exceed the available data");
  }
  for (const auto& sc : scan) {
    auto& comp = components_[sc.index];
    if (!comp.seen) {
      comp.coefficients.assign(std::size_t(comp.blocks_w) * comp.blocks_h * 64, 0);
      comp.seen = true;
    }
    comp.dc_pred = 0;
  }

  BitReader reader(data_, entropy_start);
  long unit = 0;
  for (int uy = 0; uy < units_y; ++uy) {
    for (int ux = 0; ux < units_x; ++ux) {
      if (restart_interval_ > 0 && unit > 0 && unit % restart_interval_ == 0) {
        reader.restart();
        for (const auto& sc : scan) components_[sc.index].dc_pred = 0;
      }
      if (interleaved) {
        for (const auto& sc : scan) {
          auto& comp = components_[sc.index];
          for (int v = 0; v < comp.spec.v_sampling; ++v) {
            for (int h = 0; h < comp.spec.h_sampling; ++h) {
              decode_block(reader, comp, sc, ux * comp.spec.h_sampling + h, uy * comp.spec.v_sampling + v);
            }
          }
        }
      } else {
        decode_block(reader, components_[scan[0].index], scan[0], ux, uy);
      }
      ++unit;
    }
  }
  ++scans_;
  return reader.position();
}

ImageBuffer Decoder::assemble(DecodeColor color) const {
  const auto& basis = detail::dct8_basis();
  const int width = frame_->width;
  const int height = frame_->height;

  // Inverse DCT of every block into per-component sample planes.
  std::vector<std::vector<double>> planes;
  for (const auto& comp : components_) {
    if (!comp.seen) malformed("component " + std::to_string(comp.spec.id) + " never appeared in a scan");
    const int pw = comp.blocks_w * 8;
    std::vector<double> plane(std::size_t(pw) * comp.blocks_h * 8);
    std::array<double, 64> tmp{};
    for (int by = 0; by < comp.blocks_h; ++by) {
      for (int bx = 0; bx < comp.blocks_w; ++bx) {
        const std::int32_t* block = &comp.coefficients[(std::size_t(by) * comp.blocks_w + bx) * 64];
        for (int u = 0; u < 8; ++u) {
          for (int x = 0; x < 8; ++x) {
            double sum = 0.0;
            for (int v = 0; v < 8; ++v) sum += basis[v * 8 + x] * block[u * 8 + v];
            tmp[u * 8 + x] = sum;
          }
        }
        for (int y = 0; y < 8; ++y) {
          double* line = &plane[std::size_t(by * 8 + y) * pw + bx * 8];
          for (int x = 0; x < 8; ++x) {
            double sum = 0.0;
            for (int u = 0; u < 8; ++u) sum += basis[u * 8 + y] * tmp[u * 8 + x];
            line[x] = sum + 128.0;
          }
        }
      }
    }
    planes.push_back(std::move(plane));
  }

  // Bilinear upsampling with centered sample positions.
  auto sample = [&](std::size_t ci, int y, int x) {
    const auto& comp = components_[ci];
    const int pw = comp.blocks_w * 8;
    const auto& plane = planes[ci];
    if (comp.spec.h_sampling == max_h_ && comp.spec.v_sampling == max_v_) return plane[std::size_t(y) * pw + x];
    const int comp_w = (width * comp.spec.h_sampling + max_h_ - 1) / max_h_;
    const int comp_h = (height * comp.spec.v_sampling + max_v_ - 1) / max_v_;
    const double fx = std::clamp((x + 0.5) * comp.spec.h_sampling / max_h_ - 0.5, 0.0, double(comp_w - 1));
    const double fy = std::clamp((y + 0.5) * comp.spec.v_sampling / max_v_ - 0.5, 0.0, double(comp_h - 1));
    const int x0 = int(fx);
    const int y0 = int(fy);
    const int x1 = std::min(x0 + 1, comp_w - 1);
    const int y1 = std::min(y0 + 1, comp_h - 1);
    const double ax = fx - x0;
    const double ay = fy - y0;
    const double top = plane[std::size_t(y0) * pw + x0] * (1 - ax) + plane[std::size_t(y0) * pw + x1] * ax;
    const double bottom = plane[std::size_t(y1) * pw + x0] * (1 - ax) + plane[std::size_t(y1) * pw + x1] * ax;
    return top * (1 - ay) + bottom * ay;
  };

  const bool gray = components_.size() == 1;
  const int out_channels = gray && color == DecodeColor::kNative ? 1 : 3;
  ImageBuffer out(height, width, out_channels);
  const auto& comps = frame_->components;
  const bool rgb_coded = adobe_transform_ == 0 ||
                         (!gray && comps[0].id == 'R' && comps[1].id == 'G' && comps[2].id == 'B');
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (gray) {
        const double v = quantize_u8(sample(0, y, x));
        for (int c = 0; c < out_channels; ++c) out.at(y, x, c) = v;
        continue;
      }
      const double c0 = sample(0, y, x);
      const double c1 = sample(1, y, x);
      const double c2 = sample(2, y, x);
      if (rgb_coded) {
        out.at(y, x, 0) = quantize_u8(c0);
        out.at(y, x, 1) = quantize_u8(c1);
        out.at(y, x, 2) = quantize_u8(c2);
      } else {
        const double cb = c1 - 128.0;
        const double cr = c2 - 128.0;
        out.at(y, x, 0) = quantize_u8(c0 + 1.402 * cr);
        out.at(y, x, 1) = quantize_u8(c0 - 0.344136286 * cb - 0.714136286 * cr);
        out.at(y, x, 2) = quantize_u8(c0 + 1.772 * cb);
      }
    }
  }
  return out;
}

ImageBuffer Decoder::run(DecodeColor color) {
  if (data_.size() < 2 || data_[0] != 0xFF || data_[1] != 0xD8) malformed("stream does not start with SOI");
  std::size_t pos = 2;
  for (;;) {
    if (pos >= data_.size()) {
      if (scans_ > 0) break;  // tolerate a missing EOI after complete scans
      malformed("stream ended before any scan");
    }
    if (data_[pos] != 0xFF) malformed("expected marker at offset " + std::to_string(pos));
    while (pos < data_.size() && data_[pos] == 0xFF) ++pos;
    if (pos >= data_.size()) malformed("stream ended inside marker fill");
    const std::uint8_t code = data_[pos++];
    if (code == 0xD9) break;
    if (code == 0x00 || code == 0xD8) malformed("unexpected marker byte");
    if (detail::is_standalone_code(code)) continue;
    if (data_.size() - pos < 2) malformed("segment length truncated");
    const std::size_t length = detail::read_be16(data_, pos);
    if (length < 2 || length > data_.size() - pos) malformed("segment length out of bounds");
    const auto payload = data_.subspan(pos + 2, length - 2);
    pos += length;
    if (detail::is_sof_code(code)) {
      read_frame(0xFF00 | code, payload);
    } else if (code == 0xDB) {
      detail::parse_dqt(payload, quant_);
    } else if (code == 0xC4) {
      read_dht(payload);
    } else if (code == 0xCC) {
      unsupported("arithmetic coding is not supported");
    } else if (code == 0xDD) {
      if (payload.size() != 2) malformed("DRI segment has wrong length");
      restart_interval_ = detail::read_be16(payload, 0);
    } else if (code == 0xEE) {
      if (payload.size() >= 12 && std::memcmp(payload.data(), "Adobe", 5) == 0) adobe_transform_ = payload[11];
    } else if (code == 0xDA) {
      pos = decode_scan(payload, pos);
    }
  }
  if (!frame_) malformed("no SOF segment");
  if (scans_ == 0) malformed("no scan");
  return assemble(color);
}

}  // namespace

ImageBuffer decode_jpeg(std::span<const std::uint8_t> bytes, DecodeColor color) {
  Decoder decoder(bytes);
  return decoder.run(color);
}

}  // namespace dda::jpeg
