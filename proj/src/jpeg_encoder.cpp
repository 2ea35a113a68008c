#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "dda/error.hpp"
#include "dda/jpeg_codec.hpp"
#include "dda/jpeg_tables.hpp"
#include "jpeg_internal.hpp"

namespace dda::jpeg {

namespace detail {

const std::array<double, 64>& dct8_basis() {
  static const std::array<double, 64> basis = [] {
    std::array<double, 64> b{};
    for (int u = 0; u < 8; ++u) {
      const double scale = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) b[u * 8 + x] = scale * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
    }
    return b;
  }();
  return basis;
}

}  // namespace detail

std::string_view subsampling_name(ChromaSubsampling subsampling) {
  return subsampling == ChromaSubsampling::k420 ? "420" : "444";
}

ChromaSubsampling parse_subsampling(std::string_view text) {
  if (text == "420" || text == "4:2:0") return ChromaSubsampling::k420;
  if (text == "444" || text == "4:4:4") return ChromaSubsampling::k444;
  throw Error(ErrorCode::kOutOfRange, "unknown chroma subsampling '" + std::string(text) + "'");
}

namespace {

struct Code {
  std::uint16_t bits = 0;
  std::uint8_t length = 0;
};

using CodeTable = std::array<Code, 256>;

CodeTable build_code_table(const detail::HuffmanSpec& spec) {
  CodeTable table{};
  std::uint16_t code = 0;
  std::size_t k = 0;
  for (int length = 1; length <= 16; ++length) {
    for (int i = 0; i < spec.counts[length - 1]; ++i) table[spec.values[k++]] = {code++, static_cast<std::uint8_t>(length)};
    code <<= 1;
  }
  return table;
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put(std::uint32_t bits, int length) {
    for (int i = length - 1; i >= 0; --i) {
      acc_ = (acc_ << 1) | ((bits >> i) & 1U);
      if (++count_ == 8) emit();
    }
  }

  void put(const Code& code) { put(code.bits, code.length); }

  // Pads the final byte with 1-bits.
  void flush() {
    while (count_ != 0) put(1, 1);
  }

 private:
  void emit() {
    const auto byte = static_cast<std::uint8_t>(acc_);
    out_.push_back(byte);
    if (byte == 0xFF) out_.push_back(0x00);
    acc_ = 0;
    count_ = 0;
  }

  std::vector<std::uint8_t>& out_;
  std::uint32_t acc_ = 0;
  int count_ = 0;
};

void put_marker(std::vector<std::uint8_t>& out, std::uint8_t code) {
  out.push_back(0xFF);
  out.push_back(code);
}

void put_be16(std::vector<std::uint8_t>& out, std::size_t value) {
  out.push_back(static_cast<std::uint8_t>(value >> 8));
  out.push_back(static_cast<std::uint8_t>(value & 0xFF));
}

void write_dht(std::vector<std::uint8_t>& out, int table_class, int id, const detail::HuffmanSpec& spec) {
  out.push_back(static_cast<std::uint8_t>((table_class << 4) | id));
  for (auto c : spec.counts) out.push_back(c);
  for (auto v : spec.values) out.push_back(v);
}

int magnitude_category(int value) {
  int magnitude = value < 0 ? -value : value;
  int size = 0;
  while (magnitude != 0) {
    ++size;
    magnitude >>= 1;
  }
  return size;
}

std::uint32_t magnitude_bits(int value, int size) {
  return static_cast<std::uint32_t>(value >= 0 ? value : value + (1 << size) - 1);
}

/// Level-shifted component plane padded to whole blocks.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> samples;
};

void forward_dct_block(const Plane& plane, int bx, int by, std::array<double, 64>& out) {
  const auto& basis = detail::dct8_basis();
  std::array<double, 64> rows{};
  for (int y = 0; y < 8; ++y) {
    const double* line = &plane.samples[static_cast<std::size_t>(by * 8 + y) * plane.width + bx * 8];
    for (int v = 0; v < 8; ++v) {
      double sum = 0.0;
      for (int x = 0; x < 8; ++x) sum += basis[v * 8 + x] * line[x];
      rows[y * 8 + v] = sum;
    }
  }
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      double sum = 0.0;
      for (int y = 0; y < 8; ++y) sum += basis[u * 8 + y] * rows[y * 8 + v];
      out[u * 8 + v] = sum;
    }
  }
}

struct ComponentSpec {
  int id;
  int h_sampling;
  int v_sampling;
  int table;  // quantization and Huffman table index
};

}  // namespace

std::vector<std::uint8_t> encode_jpeg(const ImageBuffer& image, int quality, ChromaSubsampling subsampling) {
  const QuantTables tables = scale_standard_tables(quality);
  if (image.height() < 8 || image.width() < 8) {
    throw Error(ErrorCode::kTooSmall, "encode_jpeg needs at least 8x8 pixels, got " + std::to_string(image.height()) +
                                          "x" + std::to_string(image.width()));
  }
  if (image.height() > 65535 || image.width() > 65535) {
    throw Error(ErrorCode::kOutOfRange, "image exceeds the 65535-pixel JPEG dimension limit");
  }

  const bool color = image.channels() == 3;
  const bool subsample = color && subsampling == ChromaSubsampling::k420;
  const int mcu_size = subsample ? 16 : 8;
  const int width = image.width();
  const int height = image.height();
  const int padded_w = (width + mcu_size - 1) / mcu_size * mcu_size;
  const int padded_h = (height + mcu_size - 1) / mcu_size * mcu_size;

  // Colour conversion to full-resolution planes, edges replicated into the padding.
  const int plane_count = color ? 3 : 1;
  std::vector<Plane> full(plane_count, Plane{padded_w, padded_h, std::vector<double>(std::size_t(padded_w) * padded_h)});
  for (int y = 0; y < padded_h; ++y) {
    const int sy = std::min(y, height - 1);
    for (int x = 0; x < padded_w; ++x) {
      const int sx = std::min(x, width - 1);
      const std::size_t at = std::size_t(y) * padded_w + x;
      if (!color) {
        full[0].samples[at] = quantize_u8(image.at(sy, sx, 0)) - 128.0;
        continue;
      }
      const double r = quantize_u8(image.at(sy, sx, 0));
      const double g = quantize_u8(image.at(sy, sx, 1));
      const double b = quantize_u8(image.at(sy, sx, 2));
      full[0].samples[at] = 0.299 * r + 0.587 * g + 0.114 * b - 128.0;
      full[1].samples[at] = -0.168735892 * r - 0.331264108 * g + 0.5 * b;
      full[2].samples[at] = 0.5 * r - 0.418687589 * g - 0.081312411 * b;
    }
  }

  std::vector<Plane> planes;
  planes.push_back(std::move(full[0]));
  for (int c = 1; c < plane_count; ++c) {
    if (!subsample) {
      planes.push_back(std::move(full[c]));
      continue;
    }
    Plane half{padded_w / 2, padded_h / 2, std::vector<double>(std::size_t(padded_w / 2) * (padded_h / 2))};
    for (int y = 0; y < half.height; ++y) {
      for (int x = 0; x < half.width; ++x) {
        const auto& s = full[c].samples;
        const std::size_t top = std::size_t(2 * y) * padded_w + 2 * x;
        half.samples[std::size_t(y) * half.width + x] = 0.25 * (s[top] + s[top + 1] + s[top + padded_w] + s[top + padded_w + 1]);
      }
    }
    planes.push_back(std::move(half));
  }

  std::vector<ComponentSpec> components;
  components.push_back({1, subsample ? 2 : 1, subsample ? 2 : 1, 0});
  if (color) {
    components.push_back({2, 1, 1, 1});
    components.push_back({3, 1, 1, 1});
  }

  std::vector<std::uint8_t> out;
  out.reserve(std::size_t(width) * height / 2 + 1024);
  put_marker(out, 0xD8);

  // APP0 / JFIF 1.01, no thumbnail.
  put_marker(out, 0xE0);
  put_be16(out, 16);
  for (char ch : std::string_view("JFIF\0", 5)) out.push_back(static_cast<std::uint8_t>(ch));
  out.insert(out.end(), {0x01, 0x01, 0x00, 0x00, 0x01, 0x00, 0x01, 0x00, 0x00});

  put_marker(out, 0xDB);
  put_be16(out, 2 + (color ? 2 : 1) * 65);
  out.push_back(0x00);
  for (auto v : tables.luma.zigzag) out.push_back(static_cast<std::uint8_t>(v));
  if (color) {
    out.push_back(0x01);
    for (auto v : tables.chroma->zigzag) out.push_back(static_cast<std::uint8_t>(v));
  }

  put_marker(out, 0xC0);
  put_be16(out, 8 + 3 * components.size());
  out.push_back(8);
  put_be16(out, height);
  put_be16(out, width);
  out.push_back(static_cast<std::uint8_t>(components.size()));
  for (const auto& c : components) {
    out.push_back(static_cast<std::uint8_t>(c.id));
    out.push_back(static_cast<std::uint8_t>((c.h_sampling << 4) | c.v_sampling));
    out.push_back(static_cast<std::uint8_t>(c.table));
  }

  const auto& dc_luma = detail::standard_dc_luma();
  const auto& ac_luma = detail::standard_ac_luma();
  const auto& dc_chroma = detail::standard_dc_chroma();
  const auto& ac_chroma = detail::standard_ac_chroma();
  put_marker(out, 0xC4);
  const std::size_t dht_len = 2 + (17 + dc_luma.values.size()) + (17 + ac_luma.values.size()) +
                              (color ? (17 + dc_chroma.values.size()) + (17 + ac_chroma.values.size()) : 0);
  put_be16(out, dht_len);
  write_dht(out, 0, 0, dc_luma);
  write_dht(out, 1, 0, ac_luma);
  if (color) {
    write_dht(out, 0, 1, dc_chroma);
    write_dht(out, 1, 1, ac_chroma);
  }

  put_marker(out, 0xDA);
  put_be16(out, 6 + 2 * components.size());
  out.push_back(static_cast<std::uint8_t>(components.size()));
  for (const auto& c : components) {
    out.push_back(static_cast<std::uint8_t>(c.id));
    out.push_back(static_cast<std::uint8_t>((c.table << 4) | c.table));
  }
  out.insert(out.end(), {0x00, 0x3F, 0x00});

  const std::array<CodeTable, 2> dc_codes = {build_code_table(dc_luma), build_code_table(dc_chroma)};
  const std::array<CodeTable, 2> ac_codes = {build_code_table(ac_luma), build_code_table(ac_chroma)};
  const std::array<std::array<std::uint16_t, 64>, 2> quant = {tables.luma.natural(),
                                                              tables.chroma ? tables.chroma->natural() : tables.luma.natural()};

  BitWriter writer(out);
  std::vector<int> dc_pred(components.size(), 0);
  std::array<double, 64> coefficients{};
  const int mcus_x = padded_w / mcu_size;
  const int mcus_y = padded_h / mcu_size;
  for (int my = 0; my < mcus_y; ++my) {
    for (int mx = 0; mx < mcus_x; ++mx) {
      for (std::size_t ci = 0; ci < components.size(); ++ci) {
        const auto& comp = components[ci];
        const auto& q = quant[comp.table];
        for (int v = 0; v < comp.v_sampling; ++v) {
          for (int h = 0; h < comp.h_sampling; ++h) {
            forward_dct_block(planes[ci], mx * comp.h_sampling + h, my * comp.v_sampling + v, coefficients);
            std::array<int, 64> zz{};
            for (int k = 0; k < 64; ++k) {
              const int natural = kZigzagToNatural[k];
              zz[k] = static_cast<int>(std::round(coefficients[natural] / q[natural]));
            }
            const int diff = zz[0] - dc_pred[ci];
            dc_pred[ci] = zz[0];
            const int dc_size = magnitude_category(diff);
            writer.put(dc_codes[comp.table][dc_size]);
            writer.put(magnitude_bits(diff, dc_size), dc_size);
            int run = 0;
            for (int k = 1; k < 64; ++k) {
              if (zz[k] == 0) {
                ++run;
                continue;
              }
              while (run > 15) {
                writer.put(ac_codes[comp.table][0xF0]);
                run -= 16;
              }
              const int size = magnitude_category(zz[k]);
              writer.put(ac_codes[comp.table][(run << 4) | size]);
              writer.put(magnitude_bits(zz[k], size), size);
              run = 0;
            }
            if (run > 0) writer.put(ac_codes[comp.table][0x00]);
          }
        }
      }
    }
  }
  writer.flush();
  put_marker(out, 0xD9);
  return out;
}

}  // namespace dda::jpeg
