#pragma once

#include <complex>
#include <vector>

#include "dda/image.hpp"

namespace dda::spectral {

enum class TransformKind { kDct, kDft };

/// Transform coefficients with the shape of the source plane. DCT spectra
/// fill `real`; DFT spectra fill `complex` (unshifted, unnormalized).
struct SpectrumMap {
  int height = 0;
  int width = 0;
  TransformKind kind = TransformKind::kDct;
  std::vector<double> real;
  std::vector<std::complex<double>> complex;

  double& at(int u, int v) { return real[static_cast<std::size_t>(u) * width + v]; }
  double at(int u, int v) const { return real[static_cast<std::size_t>(u) * width + v]; }
};

/// Orthonormal separable 2D DCT-II. Throws NonFinite.
SpectrumMap dct2(const ImagePlane& plane);

/// Inverse of dct2. Throws WrongKind for DFT spectra.
ImagePlane idct2(const SpectrumMap& spectrum);

/// Unnormalized forward 2D DFT. Throws NonFinite.
SpectrumMap dft2(const ImagePlane& plane);

/// |F| rearranged so the zero frequency sits at (H/2, W/2) (integer division).
ImagePlane centered_dft_magnitude(const ImagePlane& plane);

/// Sum of squared coefficient magnitudes.
double spectral_energy(const SpectrumMap& spectrum);

/// Square grid of mean absolute block-DCT coefficients; (0,0) is DC and
/// (block-1, block-1) the highest frequency in both axes.
struct EnergyGrid {
  int block = 8;
  std::vector<double> values;

  double at(int u, int v) const { return values[static_cast<std::size_t>(u) * block + v]; }
  /// log(1 + e) per cell, for display.
  EnergyGrid log_view() const;
};

/// Mean |DCT-II coefficient| over every full block x block tile; trailing
/// partial tiles are ignored. Throws TooSmall when either side is below
/// `block`, OutOfRange for block < 1.
EnergyGrid block_dct_energy(const ImagePlane& plane, int block = 8);

/// True when coefficient (u, v) of an H x W DCT spectrum is removed at
/// `keep_fraction`: u/(H-1) > keep or v/(W-1) > keep. Axes of length 1 are
/// never masked.
bool is_masked(int u, int v, int height, int width, double keep_fraction);

/// Zeroes the coefficients selected by is_masked. Throws WrongKind for DFT
/// spectra and OutOfRange unless keep_fraction is in (0, 1].
SpectrumMap mask_high_freq(const SpectrumMap& spectrum, double keep_fraction);

/// Per channel: dct2, mask_high_freq, idct2, then round/clamp to 8 bits.
ImageBuffer apply_hf_mask_image(const ImageBuffer& image, double keep_fraction);

struct BandError {
  double low_rel_err = 0.0;
  double high_rel_err = 0.0;
  double cutoff = 0.5;
};

/// Normalized radial frequency of centered DFT bin (i, j): each axis offset
/// from the center is divided by half the axis length (Nyquist = 1).
double radial_frequency(int i, int j, int height, int width);

/// Relative L2 error of |F_syn| against |F_real| inside the low band
/// (radial frequency <= cutoff) and the high band (> cutoff). A band whose
/// reference norm is zero yields 0 when the difference is also zero and
/// +infinity otherwise. Throws ShapeMismatch, NonFinite, OutOfRange
/// (cutoff outside (0,1)) and EmptyBand.
BandError band_relative_error(const ImagePlane& real, const ImagePlane& syn, double cutoff = 0.5);

enum class ChannelMode { kLuma, kPerChannel };

/// Image-level variants. kLuma analyses BT.601 luma; kPerChannel averages
/// the energy grids over channels and pools band norms across channels.
EnergyGrid block_dct_energy(const ImageBuffer& image, int block = 8, ChannelMode mode = ChannelMode::kLuma);
BandError band_relative_error(const ImageBuffer& real, const ImageBuffer& syn, double cutoff = 0.5,
                              ChannelMode mode = ChannelMode::kLuma);

}  // namespace dda::spectral
