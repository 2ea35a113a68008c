#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dda/image.hpp"
#include "dda/jpeg_codec.hpp"
#include "dda/rng.hpp"

namespace dda::align {

/// What to do with frequency alignment when the real image is not a JPEG.
enum class FreqFallbackMode { kSkip, kUseFallbackQf };

std::string_view fallback_mode_name(FreqFallbackMode mode);
FreqFallbackMode parse_fallback_mode(std::string_view text);

struct AlignConfig {
  double r_pixel = 0.5;  ///< upper bound of the mixup ratio draw U(0, r_pixel)
  double p_pixel = 0.5;  ///< probability of pixel-level mixup
  double p_freq = 0.5;   ///< probability of matched JPEG compression
  int fallback_qf = 96;
  FreqFallbackMode freq_fallback_mode = FreqFallbackMode::kUseFallbackQf;
  jpeg::ChromaSubsampling subsampling = jpeg::ChromaSubsampling::k420;
  bool emit_compressed_bytes = false;
  std::uint64_t seed = 0;

  /// Throws OutOfRange when a field leaves its domain.
  void validate() const;
};

enum class Label { kReal, kSynthetic };
std::string_view label_name(Label label);

struct AlignedSample {
  ImageBuffer image;
  bool applied_freq = false;
  bool applied_pixel = false;
  std::optional<int> qf_used;
  std::optional<double> r_pixel_used;
  std::string source_real;
  std::string source_recon;
  Label label = Label::kSynthetic;
  /// Encoder output when frequency alignment fired, pixel mixup did not, and
  /// the config asks for compressed persistence.
  std::optional<std::vector<std::uint8_t>> compressed_bytes;
};

/// Crops to (floor(H/m)*m, floor(W/m)*m) around the center; an odd margin
/// leaves the extra row/column at the bottom/right. Throws TooSmall.
ImageBuffer center_crop_multiple(const ImageBuffer& image, int multiple = 8);

struct CropWindow {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;
};
CropWindow center_crop_window(int height, int width, int multiple = 8);

/// decode(encode(recon, qf)); channel count and dimensions are preserved.
ImageBuffer frequency_align(const ImageBuffer& recon, int qf,
                            jpeg::ChromaSubsampling subsampling = jpeg::ChromaSubsampling::k420);

/// Draw from U(0, r_max); exactly 0 when r_max is 0. Throws OutOfRange.
double sample_mixup_ratio(Rng& rng, double r_max);

/// r * real + (1 - r) * syn in floating point, no rounding.
ImageBuffer pixel_mixup_float(const ImageBuffer& real, const ImageBuffer& syn, double r);

/// pixel_mixup_float rounded half away from zero and clamped to [0,255].
ImageBuffer pixel_mixup(const ImageBuffer& real, const ImageBuffer& syn, double r);

/// The three uniform draws consumed per pair, in stream order: the
/// frequency gate, the pixel gate, then the mixup ratio. All three are
/// always drawn so the stream position never depends on earlier outcomes.
struct AlignmentDraws {
  bool freq_gate = false;
  bool pixel_gate = false;
  double mixup_ratio = 0.0;
};
AlignmentDraws draw_alignment(Rng& rng, const AlignConfig& config);

/// Full pipeline for one pair: decode and center-crop the real image, then
/// (gated) matched-quality JPEG compression of the reconstruction, then
/// (gated) mixup with the real image. `recon` must match the cropped real
/// dimensions (ShapeMismatch otherwise); a grayscale real is promoted to RGB
/// when the reconstruction is RGB.
AlignedSample dda_align_pair(std::span<const std::uint8_t> real_bytes, const ImageBuffer& recon,
                             const AlignConfig& config, Rng& rng);

struct JpegPerturbation {
  int quality = 60;
};
struct ResizePerturbation {
  double scale = 2.0;
};
struct BlurPerturbation {
  double sigma = 2.0;
};
using Perturbation = std::variant<JpegPerturbation, ResizePerturbation, BlurPerturbation>;

/// jpeg: codec round trip at the quality. resize: bilinear to the scaled
/// size and bilinear back. blur: separable Gaussian, radius ceil(3 sigma),
/// clamped edges. Output is rounded to 8 bits. Throws OutOfRange.
ImageBuffer perturb(const ImageBuffer& image, const Perturbation& kind);

/// Bilinear resampling with half-pixel centers and clamped edges.
ImageBuffer resize_bilinear(const ImageBuffer& image, int height, int width);

}  // namespace dda::align
