#include "dda/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "dda/error.hpp"

namespace dda::spectral {

namespace {

/// Row-major N x N orthonormal DCT-II matrix: m[u * N + x] = c(u) cos((2x+1) u pi / 2N).
std::vector<double> dct_matrix(int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  const double c0 = std::sqrt(1.0 / n);
  const double c1 = std::sqrt(2.0 / n);
  for (int u = 0; u < n; ++u) {
    for (int x = 0; x < n; ++x) {
      m[static_cast<std::size_t>(u) * n + x] =
          (u == 0 ? c0 : c1) * std::cos((2.0 * x + 1.0) * u * std::numbers::pi / (2.0 * n));
    }
  }
  return m;
}

/// out = A * in * B^T for row-major A (h x h), in (h x w), B (w x w).
/// With transpose set, computes A^T * in * B instead.
std::vector<double> separable(const std::vector<double>& a, const std::vector<double>& in,
                              const std::vector<double>& b, int h, int w, bool transpose) {
  std::vector<double> rows(static_cast<std::size_t>(h) * w, 0.0);
  for (int y = 0; y < h; ++y) {
    const double* src = &in[static_cast<std::size_t>(y) * w];
    double* dst = &rows[static_cast<std::size_t>(y) * w];
    for (int v = 0; v < w; ++v) {
      double sum = 0.0;
      if (!transpose) {
        const double* basis = &b[static_cast<std::size_t>(v) * w];
        for (int x = 0; x < w; ++x) sum += basis[x] * src[x];
      } else {
        for (int x = 0; x < w; ++x) sum += b[static_cast<std::size_t>(x) * w + v] * src[x];
      }
      dst[v] = sum;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(h) * w, 0.0);
  for (int u = 0; u < h; ++u) {
    double* dst = &out[static_cast<std::size_t>(u) * w];
    for (int y = 0; y < h; ++y) {
      const double coeff = transpose ? a[static_cast<std::size_t>(y) * h + u] : a[static_cast<std::size_t>(u) * h + y];
      if (coeff == 0.0) continue;
      const double* src = &rows[static_cast<std::size_t>(y) * w];
      for (int v = 0; v < w; ++v) dst[v] += coeff * src[v];
    }
  }
  return out;
}

void require_finite(const ImagePlane& plane, const char* what) {
  if (!plane.all_finite()) throw Error(ErrorCode::kNonFinite, std::string(what) + ": plane contains non-finite samples");
}

// FFTW's planner is not re-entrant; execution of distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

struct PlanDestroy {
  void operator()(fftw_plan plan) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
};

using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using FftwPlan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

struct BandSums {
  double num_low = 0.0;
  double den_low = 0.0;
  double num_high = 0.0;
  double den_high = 0.0;
  std::size_t low_bins = 0;
  std::size_t high_bins = 0;
};

BandSums band_sums(const ImagePlane& real, const ImagePlane& syn, double cutoff) {
  const ImagePlane real_mag = centered_dft_magnitude(real);
  const ImagePlane syn_mag = centered_dft_magnitude(syn);
  BandSums sums;
  for (int i = 0; i < real.height(); ++i) {
    for (int j = 0; j < real.width(); ++j) {
      const double diff = syn_mag.at(i, j) - real_mag.at(i, j);
      const double ref = real_mag.at(i, j);
      if (radial_frequency(i, j, real.height(), real.width()) <= cutoff) {
        sums.num_low += diff * diff;
        sums.den_low += ref * ref;
        ++sums.low_bins;
      } else {
        sums.num_high += diff * diff;
        sums.den_high += ref * ref;
        ++sums.high_bins;
      }
    }
  }
  return sums;
}

double relative(double num_sq, double den_sq) {
  if (den_sq == 0.0) return num_sq == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num_sq / den_sq);
}

BandError finish(const BandSums& sums, double cutoff) {
  if (sums.low_bins == 0) throw Error(ErrorCode::kEmptyBand, "low band contains no DFT bins");
  if (sums.high_bins == 0) throw Error(ErrorCode::kEmptyBand, "high band contains no DFT bins");
  return BandError{relative(sums.num_low, sums.den_low), relative(sums.num_high, sums.den_high), cutoff};
}

void check_cutoff(double cutoff) {
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw Error(ErrorCode::kOutOfRange, "cutoff must lie in (0,1)");
}

}  // namespace

SpectrumMap dct2(const ImagePlane& plane) {
  require_finite(plane, "dct2");
  const int h = plane.height();
  const int w = plane.width();
  SpectrumMap out;
  out.height = h;
  out.width = w;
  out.kind = TransformKind::kDct;
  const std::vector<double> samples(plane.samples().begin(), plane.samples().end());
  out.real = separable(dct_matrix(h), samples, dct_matrix(w), h, w, false);
  return out;
}

ImagePlane idct2(const SpectrumMap& spectrum) {
  if (spectrum.kind != TransformKind::kDct) throw Error(ErrorCode::kWrongKind, "idct2 needs a DCT spectrum");
  const int h = spectrum.height;
  const int w = spectrum.width;
  return ImagePlane(h, w, separable(dct_matrix(h), spectrum.real, dct_matrix(w), h, w, true));
}

SpectrumMap dft2(const ImagePlane& plane) {
  require_finite(plane, "dft2");
  const int h = plane.height();
  const int w = plane.width();
  const std::size_t n = plane.size();
  FftwBuffer in(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  FftwBuffer out(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  if (!in || !out) throw std::bad_alloc();
  FftwPlan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan.reset(fftw_plan_dft_2d(h, w, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE));
  }
  if (!plan) throw Error(ErrorCode::kOutOfRange, "FFTW could not plan a " + std::to_string(h) + "x" + std::to_string(w) + " DFT");
  auto samples = plane.samples();
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = samples[i];
    in[i][1] = 0.0;
  }
  fftw_execute(plan.get());
  SpectrumMap spectrum;
  spectrum.height = h;
  spectrum.width = w;
  spectrum.kind = TransformKind::kDft;
  spectrum.complex.resize(n);
  for (std::size_t i = 0; i < n; ++i) spectrum.complex[i] = {out[i][0], out[i][1]};
  return spectrum;
}

ImagePlane centered_dft_magnitude(const ImagePlane& plane) {
  const SpectrumMap spectrum = dft2(plane);
  const int h = plane.height();
  const int w = plane.width();
  ImagePlane centered(h, w);
  for (int k = 0; k < h; ++k) {
    for (int l = 0; l < w; ++l) {
      const int i = (k + h / 2) % h;
      const int j = (l + w / 2) % w;
      centered.at(i, j) = std::abs(spectrum.complex[static_cast<std::size_t>(k) * w + l]);
    }
  }
  return centered;
}

double spectral_energy(const SpectrumMap& spectrum) {
  double sum = 0.0;
  if (spectrum.kind == TransformKind::kDct) {
    for (double c : spectrum.real) sum += c * c;
  } else {
    for (const auto& c : spectrum.complex) sum += std::norm(c);
  }
  return sum;
}

EnergyGrid EnergyGrid::log_view() const {
  EnergyGrid out = *this;
  for (double& v : out.values) v = std::log1p(v);
  return out;
}

EnergyGrid block_dct_energy(const ImagePlane& plane, int block) {
  if (block < 1) throw Error(ErrorCode::kOutOfRange, "block size must be positive");
  if (plane.height() < block || plane.width() < block) {
    throw Error(ErrorCode::kTooSmall, "plane smaller than one " + std::to_string(block) + "x" + std::to_string(block) + " block");
  }
  require_finite(plane, "block_dct_energy");
  const auto basis = dct_matrix(block);
  const int blocks_y = plane.height() / block;
  const int blocks_x = plane.width() / block;
  EnergyGrid grid;
  grid.block = block;
  grid.values.assign(static_cast<std::size_t>(block) * block, 0.0);
  std::vector<double> tile(static_cast<std::size_t>(block) * block);
  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      for (int y = 0; y < block; ++y) {
        for (int x = 0; x < block; ++x) tile[static_cast<std::size_t>(y) * block + x] = plane.at(by * block + y, bx * block + x);
      }
      const auto coeffs = separable(basis, tile, basis, block, block, false);
      for (std::size_t i = 0; i < coeffs.size(); ++i) grid.values[i] += std::abs(coeffs[i]);
    }
  }
  const double count = static_cast<double>(blocks_y) * blocks_x;
  for (double& v : grid.values) v /= count;
  return grid;
}

bool is_masked(int u, int v, int height, int width, double keep_fraction) {
  const bool vertical = height > 1 && static_cast<double>(u) / (height - 1) > keep_fraction;
  const bool horizontal = width > 1 && static_cast<double>(v) / (width - 1) > keep_fraction;
  return vertical || horizontal;
}

SpectrumMap mask_high_freq(const SpectrumMap& spectrum, double keep_fraction) {
  if (spectrum.kind != TransformKind::kDct) throw Error(ErrorCode::kWrongKind, "mask_high_freq needs a DCT spectrum");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "keep_fraction must lie in (0,1]");
  }
  SpectrumMap out = spectrum;
  for (int u = 0; u < out.height; ++u) {
    for (int v = 0; v < out.width; ++v) {
      if (is_masked(u, v, out.height, out.width, keep_fraction)) out.at(u, v) = 0.0;
    }
  }
  return out;
}

ImageBuffer apply_hf_mask_image(const ImageBuffer& image, double keep_fraction) {
  ImageBuffer out(image.height(), image.width(), image.channels());
  for (int c = 0; c < image.channels(); ++c) {
    ImagePlane restored = idct2(mask_high_freq(dct2(image.channel(c)), keep_fraction));
    for (double& v : restored.samples()) v = quantize_u8(v);
    out.set_channel(c, restored);
  }
  return out;
}

double radial_frequency(int i, int j, int height, int width) {
  const double fy = height > 1 ? (i - height / 2) / (height / 2.0) : 0.0;
  const double fx = width > 1 ? (j - width / 2) / (width / 2.0) : 0.0;
  return std::sqrt(fy * fy + fx * fx);
}

BandError band_relative_error(const ImagePlane& real, const ImagePlane& syn, double cutoff) {
  check_cutoff(cutoff);
  if (real.height() != syn.height() || real.width() != syn.width()) {
    throw Error(ErrorCode::kShapeMismatch, "band_relative_error inputs differ in shape");
  }
  return finish(band_sums(real, syn, cutoff), cutoff);
}

EnergyGrid block_dct_energy(const ImageBuffer& image, int block, ChannelMode mode) {
  if (mode == ChannelMode::kLuma || image.channels() == 1) return block_dct_energy(to_luma(image), block);
  EnergyGrid sum = block_dct_energy(image.channel(0), block);
  for (int c = 1; c < image.channels(); ++c) {
    const EnergyGrid g = block_dct_energy(image.channel(c), block);
    for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += g.values[i];
  }
  for (double& v : sum.values) v /= image.channels();
  return sum;
}

BandError band_relative_error(const ImageBuffer& real, const ImageBuffer& syn, double cutoff, ChannelMode mode) {
  check_cutoff(cutoff);
  if (!real.same_shape(syn)) throw Error(ErrorCode::kShapeMismatch, "band_relative_error inputs differ in shape");
  if (mode == ChannelMode::kLuma) return band_relative_error(to_luma(real), to_luma(syn), cutoff);
  BandSums pooled;
  for (int c = 0; c < real.channels(); ++c) {
    const BandSums s = band_sums(real.channel(c), syn.channel(c), cutoff);
    pooled.num_low += s.num_low;
    pooled.den_low += s.den_low;
    pooled.num_high += s.num_high;
    pooled.den_high += s.den_high;
    pooled.low_bins += s.low_bins;
    pooled.high_bins += s.high_bins;
  }
  return finish(pooled, cutoff);
}

}  // namespace dda::spectral
