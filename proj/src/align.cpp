#include "dda/align.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dda/error.hpp"
#include "dda/image_io.hpp"
#include "dda/jpeg_parser.hpp"
#include "dda/jpeg_tables.hpp"

namespace dda::align {

namespace {

void check_unit(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, std::string(name) + " must lie in [0,1], got " + std::to_string(value));
  }
}

std::string dims(const ImageBuffer& image) {
  return std::to_string(image.height()) + "x" + std::to_string(image.width()) + "x" + std::to_string(image.channels());
}

}  // namespace

std::string_view fallback_mode_name(FreqFallbackMode mode) {
  return mode == FreqFallbackMode::kSkip ? "skip" : "use_fallback_qf";
}

FreqFallbackMode parse_fallback_mode(std::string_view text) {
  if (text == "skip") return FreqFallbackMode::kSkip;
  if (text == "use_fallback_qf") return FreqFallbackMode::kUseFallbackQf;
  throw Error(ErrorCode::kOutOfRange, "unknown frequency fallback mode '" + std::string(text) + "'");
}

std::string_view label_name(Label label) { return label == Label::kReal ? "REAL" : "SYNTHETIC"; }

void AlignConfig::validate() const {
  check_unit(r_pixel, "R_pixel");
  check_unit(p_pixel, "p_pixel");
  check_unit(p_freq, "p_freq");
  if (fallback_qf < 1 || fallback_qf > 100) throw Error(ErrorCode::kOutOfRange, "fallback_qf must lie in [1,100]");
}

CropWindow center_crop_window(int height, int width, int multiple) {
  if (multiple < 1) throw Error(ErrorCode::kOutOfRange, "crop multiple must be positive");
  if (height < multiple || width < multiple) {
    throw Error(ErrorCode::kTooSmall, std::to_string(height) + "x" + std::to_string(width) +
                                          " is smaller than one " + std::to_string(multiple) + "-pixel block");
  }
  CropWindow window;
  window.height = height / multiple * multiple;
  window.width = width / multiple * multiple;
  window.top = (height - window.height) / 2;
  window.left = (width - window.width) / 2;
  return window;
}

ImageBuffer center_crop_multiple(const ImageBuffer& image, int multiple) {
  const CropWindow w = center_crop_window(image.height(), image.width(), multiple);
  if (w.height == image.height() && w.width == image.width()) return image;
  ImageBuffer out(w.height, w.width, image.channels());
  for (int y = 0; y < w.height; ++y) {
    for (int x = 0; x < w.width; ++x) {
      for (int c = 0; c < image.channels(); ++c) out.at(y, x, c) = image.at(w.top + y, w.left + x, c);
    }
  }
  return out;
}

ImageBuffer frequency_align(const ImageBuffer& recon, int qf, jpeg::ChromaSubsampling subsampling) {
  return jpeg::decode_jpeg(jpeg::encode_jpeg(recon, qf, subsampling), jpeg::DecodeColor::kNative);
}

double sample_mixup_ratio(Rng& rng, double r_max) {
  check_unit(r_max, "R_pixel");
  return r_max * rng.uniform01();
}

ImageBuffer pixel_mixup_float(const ImageBuffer& real, const ImageBuffer& syn, double r) {
  check_unit(r, "mixup ratio");
  if (!real.same_shape(syn)) {
    throw Error(ErrorCode::kShapeMismatch, "mixup inputs differ: " + dims(real) + " vs " + dims(syn));
  }
  ImageBuffer out(real.height(), real.width(), real.channels());
  auto a = real.samples();
  auto b = syn.samples();
  auto o = out.samples();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = r * a[i] + (1.0 - r) * b[i];
  return out;
}

ImageBuffer pixel_mixup(const ImageBuffer& real, const ImageBuffer& syn, double r) {
  return quantize_image(pixel_mixup_float(real, syn, r));
}

AlignmentDraws draw_alignment(Rng& rng, const AlignConfig& config) {
  AlignmentDraws draws;
  draws.freq_gate = rng.bernoulli(config.p_freq);
  draws.pixel_gate = rng.bernoulli(config.p_pixel);
  draws.mixup_ratio = sample_mixup_ratio(rng, config.r_pixel);
  return draws;
}

AlignedSample dda_align_pair(std::span<const std::uint8_t> real_bytes, const ImageBuffer& recon,
                             const AlignConfig& config, Rng& rng) {
  config.validate();
  ImageBuffer real = center_crop_multiple(decode_image(real_bytes));
  if (real.channels() == 1 && recon.channels() == 3) real = gray_to_rgb(real);
  if (!real.same_shape(recon)) {
    throw Error(ErrorCode::kShapeMismatch, "reconstruction " + dims(recon) + " does not match center-cropped real " + dims(real));
  }

  const AlignmentDraws draws = draw_alignment(rng, config);
  AlignedSample sample;
  sample.label = Label::kSynthetic;
  sample.image = recon;

  if (draws.freq_gate) {
    std::optional<int> qf;
    if (jpeg::is_jpeg(real_bytes)) {
      qf = jpeg::estimate_quality(jpeg::extract_quant_tables(real_bytes)).quality;
    } else if (config.freq_fallback_mode == FreqFallbackMode::kUseFallbackQf) {
      qf = config.fallback_qf;
    }
    if (qf) {
      auto encoded = jpeg::encode_jpeg(sample.image, *qf, config.subsampling);
      sample.image = jpeg::decode_jpeg(encoded, jpeg::DecodeColor::kNative);
      sample.applied_freq = true;
      sample.qf_used = qf;
      if (config.emit_compressed_bytes) sample.compressed_bytes = std::move(encoded);
    }
  }

  if (draws.pixel_gate) {
    sample.image = pixel_mixup(real, sample.image, draws.mixup_ratio);
    sample.applied_pixel = true;
    sample.r_pixel_used = draws.mixup_ratio;
    sample.compressed_bytes.reset();
  }
  return sample;
}

ImageBuffer resize_bilinear(const ImageBuffer& image, int height, int width) {
  if (height < 1 || width < 1) throw Error(ErrorCode::kOutOfRange, "resize target must be positive");
  ImageBuffer out(height, width, image.channels());
  const double sy = static_cast<double>(image.height()) / height;
  const double sx = static_cast<double>(image.width()) / width;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, image.height() - 1);
    const double ay = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, image.width() - 1);
      const double ax = fx - x0;
      for (int c = 0; c < image.channels(); ++c) {
        const double top = image.at(y0, x0, c) * (1 - ax) + image.at(y0, x1, c) * ax;
        const double bottom = image.at(y1, x0, c) * (1 - ax) + image.at(y1, x1, c) * ax;
        out.at(y, x, c) = top * (1 - ay) + bottom * ay;
      }
    }
  }
  return out;
}

namespace {

ImageBuffer gaussian_blur(const ImageBuffer& image, double sigma) {
  if (sigma == 0.0) return quantize_image(image);
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    total += kernel[i + radius];
  }
  for (double& k : kernel) k /= total;

  const int h = image.height();
  const int w = image.width();
  ImageBuffer horizontal(h, w, image.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < image.channels(); ++c) {
        double sum = 0.0;
        for (int i = -radius; i <= radius; ++i) sum += kernel[i + radius] * image.at(y, std::clamp(x + i, 0, w - 1), c);
        horizontal.at(y, x, c) = sum;
      }
    }
  }
  ImageBuffer out(h, w, image.channels());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < image.channels(); ++c) {
        double sum = 0.0;
        for (int i = -radius; i <= radius; ++i) sum += kernel[i + radius] * horizontal.at(std::clamp(y + i, 0, h - 1), x, c);
        out.at(y, x, c) = sum;
      }
    }
  }
  return quantize_image(out);
}

}  // namespace

ImageBuffer perturb(const ImageBuffer& image, const Perturbation& kind) {
  if (const auto* j = std::get_if<JpegPerturbation>(&kind)) {
    return frequency_align(image, j->quality);
  }
  if (const auto* r = std::get_if<ResizePerturbation>(&kind)) {
    if (!(r->scale > 0.0) || !std::isfinite(r->scale)) throw Error(ErrorCode::kOutOfRange, "resize scale must be positive");
    const int h = std::max(1, static_cast<int>(std::lround(image.height() * r->scale)));
    const int w = std::max(1, static_cast<int>(std::lround(image.width() * r->scale)));
    return quantize_image(resize_bilinear(resize_bilinear(image, h, w), image.height(), image.width()));
  }
  const auto& b = std::get<BlurPerturbation>(kind);
  if (!(b.sigma >= 0.0) || !std::isfinite(b.sigma)) throw Error(ErrorCode::kOutOfRange, "blur sigma must be non-negative");
  return gaussian_blur(image, b.sigma);
}

}  // namespace dda::align
