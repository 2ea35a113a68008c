#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "dda/align.hpp"
#include "dda/error.hpp"
#include "dda/jpeg_codec.hpp"
#include "dda/spectral.hpp"
#include "support/fixtures.hpp"

namespace dda::spectral {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Direct-sum references, written from the textbook definitions.
std::vector<double> naive_dct(const ImagePlane& p) {
  const int H = p.height(), W = p.width();
  std::vector<double> out(static_cast<std::size_t>(H) * W);
  for (int u = 0; u < H; ++u) {
    for (int v = 0; v < W; ++v) {
      double s = 0.0;
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
          s += p.at(y, x) * std::cos(kPi * (2 * y + 1) * u / (2.0 * H)) * std::cos(kPi * (2 * x + 1) * v / (2.0 * W));
      const double au = std::sqrt((u == 0 ? 1.0 : 2.0) / H);
      const double av = std::sqrt((v == 0 ? 1.0 : 2.0) / W);
      out[static_cast<std::size_t>(u) * W + v] = au * av * s;
    }
  }
  return out;
}

std::vector<std::complex<double>> naive_dft(const ImagePlane& p) {
  const int H = p.height(), W = p.width();
  std::vector<std::complex<double>> out(static_cast<std::size_t>(H) * W);
  for (int u = 0; u < H; ++u)
    for (int v = 0; v < W; ++v) {
      std::complex<double> s = 0.0;
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) s += p.at(y, x) * std::polar(1.0, -2 * kPi * (double(u) * y / H + double(v) * x / W));
      out[static_cast<std::size_t>(u) * W + v] = s;
    }
  return out;
}

// Reference band error: centered magnitudes via naive DFT, bins split by
// sqrt(((i - H/2) / (H/2))^2 + ((j - W/2) / (W/2))^2) <= cutoff.
std::pair<double, double> naive_band_error(const ImagePlane& real, const ImagePlane& syn, double cutoff) {
  const int H = real.height(), W = real.width();
  const auto fr = naive_dft(real);
  const auto fs = naive_dft(syn);
  double num[2] = {0, 0}, den[2] = {0, 0};
  for (int i = 0; i < H; ++i)
    for (int j = 0; j < W; ++j) {
      const int u = (i - H / 2 + H) % H;  // unshifted index of centered bin i
      const int v = (j - W / 2 + W) % W;
      const double fy = H > 1 ? (i - H / 2) / (H / 2.0) : 0.0;
      const double fx = W > 1 ? (j - W / 2) / (W / 2.0) : 0.0;
      const int band = std::sqrt(fy * fy + fx * fx) <= cutoff ? 0 : 1;
      const double a = std::abs(fr[static_cast<std::size_t>(u) * W + v]);
      const double b = std::abs(fs[static_cast<std::size_t>(u) * W + v]);
      num[band] += (b - a) * (b - a);
      den[band] += a * a;
    }
  return {std::sqrt(num[0]) / std::sqrt(den[0]), std::sqrt(num[1]) / std::sqrt(den[1])};
}

double sum_sq(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected dda::Error";
  return ErrorCode::kIo;
}

TEST(Dct, ConstantIsDcOnly) {
  const ImagePlane p(6, 10, 3.5);
  const SpectrumMap s = dct2(p);
  EXPECT_NEAR(s.at(0, 0), 3.5 * std::sqrt(60.0), 1e-12);
  for (int u = 0; u < 6; ++u)
    for (int v = 0; v < 10; ++v)
      if (u || v) {
        EXPECT_NEAR(s.at(u, v), 0.0, 1e-12);
      }
}

TEST(Dct, ImpulseCoefficients) {
  ImagePlane p(8, 8, 0.0);
  p.at(0, 0) = 1.0;
  const SpectrumMap s = dct2(p);
  EXPECT_NEAR(s.at(0, 0), 0.125, 1e-15);
  // a(u) a(v) cos(pi u / 16) cos(pi v / 16), a(0) = sqrt(1/8), a(k) = 1/2
  EXPECT_NEAR(s.at(0, 3), 0.14698445030241986, 1e-15);
  EXPECT_NEAR(s.at(5, 6), 0.053151880922953545, 1e-15);
  EXPECT_NEAR(sum_sq(s.real), 1.0, 1e-14);
}

TEST(Dct, MatchesDirectSum) {
  const ImagePlane p = fixtures::noise_plane(7, 11, 1);
  const SpectrumMap s = dct2(p);
  const auto ref = naive_dct(p);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(s.real[i], ref[i], 1e-9);
}

TEST(Dct, RoundTripAndParseval) {
  for (auto [h, w] : {std::pair{1, 1}, {8, 8}, {37, 53}, {336, 336}}) {
    const ImagePlane p = fixtures::noise_plane(h, w, 100 + h);
    const SpectrumMap s = dct2(p);
    const ImagePlane back = idct2(s);
    double err = 0;
    for (std::size_t i = 0; i < p.size(); ++i) err += std::pow(back.samples()[i] - p.samples()[i], 2);
    EXPECT_LT(std::sqrt(err / p.size()), 1e-6) << h << "x" << w;
    const double e = sum_sq(p.samples());
    EXPECT_LT(std::abs(spectral_energy(s) - e) / e, 1e-9) << h << "x" << w;
  }
}

TEST(Dct, Linearity) {
  const ImagePlane x = fixtures::noise_plane(19, 24, 2);
  const ImagePlane y = fixtures::noise_plane(19, 24, 3);
  const double a = 0.7, b = -2.3;
  ImagePlane z(19, 24);
  for (std::size_t i = 0; i < z.size(); ++i) z.samples()[i] = a * x.samples()[i] + b * y.samples()[i];
  const auto sx = dct2(x), sy = dct2(y), sz = dct2(z);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < sz.real.size(); ++i) {
    const double expect = a * sx.real[i] + b * sy.real[i];
    num += std::pow(sz.real[i] - expect, 2);
    den += expect * expect;
  }
  EXPECT_LT(std::sqrt(num / den), 1e-9);
}

TEST(Dct, InverseEdgeCases) {
  SpectrumMap zero = dct2(ImagePlane(5, 4, 0.0));
  const ImagePlane z = idct2(zero);
  for (double v : z.samples()) EXPECT_EQ(v, 0.0);
  SpectrumMap dc = zero;
  dc.at(0, 0) = std::sqrt(20.0) * 9.0;
  const ImagePlane c = idct2(dc);
  for (double v : c.samples()) EXPECT_NEAR(v, 9.0, 1e-12);
}

TEST(Dct, Errors) {
  ImagePlane p(4, 4, 1.0);
  p.at(1, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(code_of([&] { dct2(p); }), ErrorCode::kNonFinite);
  const SpectrumMap f = dft2(ImagePlane(4, 4, 1.0));
  EXPECT_EQ(code_of([&] { idct2(f); }), ErrorCode::kWrongKind);
  EXPECT_EQ(code_of([&] { mask_high_freq(f, 0.5); }), ErrorCode::kWrongKind);
}

TEST(Dft, MatchesDirectSum) {
  const ImagePlane p = fixtures::noise_plane(7, 9, 4);
  const SpectrumMap s = dft2(p);
  EXPECT_EQ(s.kind, TransformKind::kDft);
  const auto ref = naive_dft(p);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_LT(std::abs(s.complex[i] - ref[i]), 1e-8);
}

TEST(Dft, CenteredMagnitudeHasDcAtCenter) {
  const ImagePlane p(6, 5, 2.0);
  const ImagePlane m = centered_dft_magnitude(p);
  EXPECT_NEAR(m.at(3, 2), 60.0, 1e-9);
  EXPECT_NEAR(m.at(0, 0), 0.0, 1e-9);
}

TEST(Dft, RadialFrequency) {
  EXPECT_DOUBLE_EQ(radial_frequency(4, 4, 8, 8), 0.0);
  EXPECT_DOUBLE_EQ(radial_frequency(0, 4, 8, 8), 1.0);
  EXPECT_DOUBLE_EQ(radial_frequency(0, 0, 8, 8), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(radial_frequency(6, 4, 8, 8), 0.5);
}

TEST(BlockEnergy, ConstantIsDcOnly) {
  const EnergyGrid g = block_dct_energy(ImagePlane(24, 16, 50.0));
  EXPECT_NEAR(g.at(0, 0), 400.0, 1e-9);
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v)
      if (u || v) {
        EXPECT_NEAR(g.at(u, v), 0.0, 1e-9);
      }
}

TEST(BlockEnergy, PartialTilesIgnored) {
  ImagePlane p(12, 9, 10.0);
  for (int y = 8; y < 12; ++y)
    for (int x = 0; x < 9; ++x) p.at(y, x) = (x + y) % 2 ? 255 : 0;
  const EnergyGrid g = block_dct_energy(p);
  EXPECT_NEAR(g.at(7, 7), 0.0, 1e-12);
}

TEST(BlockEnergy, BlurReducesHighestCell) {
  const ImageBuffer noise = fixtures::noise_image(64, 64, 1, 5);
  const EnergyGrid a = block_dct_energy(noise.channel(0));
  const EnergyGrid b = block_dct_energy(fixtures::box_blur3(noise).channel(0));
  EXPECT_LT(b.at(7, 7), a.at(7, 7));
}

TEST(BlockEnergy, JpegReducesHighestCell) {
  const ImageBuffer noise = fixtures::noise_image(64, 64, 3, 6);
  const ImageBuffer jpeg = jpeg::decode_jpeg(jpeg::encode_jpeg(noise, 60));
  EXPECT_LT(block_dct_energy(jpeg).at(7, 7), block_dct_energy(noise).at(7, 7));
}

TEST(BlockEnergy, BlockSizeAndErrors) {
  EXPECT_EQ(block_dct_energy(ImagePlane(32, 32, 1.0), 16).values.size(), 256u);
  EXPECT_EQ(code_of([] { block_dct_energy(ImagePlane(7, 32, 1.0)); }), ErrorCode::kTooSmall);
  EXPECT_EQ(code_of([] { block_dct_energy(ImagePlane(8, 8, 1.0), 0); }), ErrorCode::kOutOfRange);
}

TEST(BlockEnergy, LogView) {
  const EnergyGrid g = block_dct_energy(ImagePlane(8, 8, 2.0));
  EXPECT_NEAR(g.log_view().at(0, 0), std::log1p(16.0), 1e-12);
  EXPECT_NEAR(g.log_view().at(1, 1), 0.0, 1e-12);
}

TEST(Mask, KeepOneIsIdentity) {
  const SpectrumMap s = dct2(fixtures::noise_plane(9, 13, 7));
  EXPECT_EQ(mask_high_freq(s, 1.0).real, s.real);
}

TEST(Mask, HalfOnEightByEight) {
  SpectrumMap s = dct2(ImagePlane(8, 8, 0.0));
  std::fill(s.real.begin(), s.real.end(), 1.0);
  const SpectrumMap m = mask_high_freq(s, 0.5);
  int kept = 0;
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      const bool keep = m.at(u, v) != 0.0;
      kept += keep;
      // 3/7 = 0.43 <= 0.5 < 4/7 = 0.57
      EXPECT_EQ(keep, u <= 3 && v <= 3) << u << "," << v;
    }
  EXPECT_EQ(kept, 16);
}

TEST(Mask, SingletonAxesNeverMasked) {
  EXPECT_FALSE(is_masked(0, 2, 1, 6, 0.4));
  EXPECT_TRUE(is_masked(0, 5, 1, 6, 0.5));
  EXPECT_FALSE(is_masked(0, 0, 1, 1, 0.01));
}

TEST(Mask, NestingAndEnergyMonotone) {
  const SpectrumMap s = dct2(fixtures::noise_plane(20, 30, 8));
  const double keeps[] = {1.0, 0.95, 0.90, 0.85, 0.80, 0.5, 0.1};
  double prev_energy = std::numeric_limits<double>::infinity();
  std::vector<double> prev;
  for (double k : keeps) {
    const SpectrumMap m = mask_high_freq(s, k);
    const double e = spectral_energy(m);
    EXPECT_LE(e, prev_energy);
    prev_energy = e;
    if (!prev.empty()) {
      for (std::size_t i = 0; i < prev.size(); ++i)
        if (prev[i] == 0.0) {
          EXPECT_EQ(m.real[i], 0.0);
        }
    }
    prev = m.real;
  }
}

TEST(Mask, Idempotent) {
  const SpectrumMap s = dct2(fixtures::noise_plane(16, 12, 9));
  for (double k : {0.95, 0.8, 0.3}) {
    const SpectrumMap once = mask_high_freq(s, k);
    EXPECT_EQ(mask_high_freq(once, k).real, once.real);
  }
}

TEST(Mask, KeepDomain) {
  const SpectrumMap s = dct2(ImagePlane(4, 4, 1.0));
  EXPECT_EQ(code_of([&] { mask_high_freq(s, 0.0); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([&] { mask_high_freq(s, 1.01); }), ErrorCode::kOutOfRange);
}

TEST(MaskImage, KeepOneWithinOneCode) {
  const ImageBuffer img = fixtures::noise_image(33, 41, 3, 10);
  EXPECT_LE(fixtures::max_abs_diff(apply_hf_mask_image(img, 1.0), img), 1.0);
}

TEST(MaskImage, ConstantUnchanged) {
  const ImageBuffer img = fixtures::constant_image(16, 24, 3, 77);
  for (double k : {0.95, 0.5, 0.1}) EXPECT_EQ(apply_hf_mask_image(img, k), img);
}

TEST(MaskImage, StrongerMaskLargerError) {
  const ImageBuffer img = fixtures::noise_image(48, 48, 3, 11);
  auto err = [&](double k) {
    const ImageBuffer out = apply_hf_mask_image(img, k);
    double s = 0;
    for (std::size_t i = 0; i < img.size(); ++i) s += std::pow(out.samples()[i] - img.samples()[i], 2);
    return s;
  };
  EXPECT_GT(err(0.80), err(0.95));
}

TEST(BandError, IdenticalIsZero) {
  const ImagePlane p = fixtures::noise_plane(16, 20, 12);
  const BandError e = band_relative_error(p, p);
  EXPECT_EQ(e.low_rel_err, 0.0);
  EXPECT_EQ(e.high_rel_err, 0.0);
  EXPECT_EQ(e.cutoff, 0.5);
}

TEST(BandError, MatchesReference) {
  const ImagePlane a = fixtures::noise_plane(12, 10, 13);
  const ImagePlane b = fixtures::noise_plane(12, 10, 14);
  for (double cutoff : {0.3, 0.5, 0.8}) {
    const BandError e = band_relative_error(a, b, cutoff);
    const auto [lo, hi] = naive_band_error(a, b, cutoff);
    EXPECT_NEAR(e.low_rel_err, lo, 1e-9 * lo);
    EXPECT_NEAR(e.high_rel_err, hi, 1e-9 * hi);
  }
  const ImagePlane c = fixtures::noise_plane(9, 7, 15);
  const ImagePlane d = fixtures::noise_plane(9, 7, 16);
  const auto [lo, hi] = naive_band_error(c, d, 0.5);
  EXPECT_NEAR(band_relative_error(c, d).low_rel_err, lo, 1e-9 * lo);
  EXPECT_NEAR(band_relative_error(c, d).high_rel_err, hi, 1e-9 * hi);
}

TEST(BandError, JpegHitsHighBandHarder) {
  const ImageBuffer noise = fixtures::noise_image(64, 64, 3, 17);
  const ImageBuffer jpeg = jpeg::decode_jpeg(jpeg::encode_jpeg(noise, 60));
  const BandError e = band_relative_error(noise, jpeg);
  EXPECT_GT(e.high_rel_err, e.low_rel_err);
}

TEST(BandError, CheckerboardOnConstantIsInfinite) {
  const ImagePlane real(16, 16, 100.0);
  ImagePlane syn = real;
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) syn.at(y, x) += (x + y) % 2 ? -1.0 : 1.0;
  const BandError e = band_relative_error(real, syn);
  EXPECT_EQ(e.low_rel_err, 0.0);
  EXPECT_TRUE(std::isinf(e.high_rel_err));
}

TEST(BandError, ScaleCovariant) {
  // syn = real + g * (h (*) real) with circular h = [1/4 1/2 1/4] x [1/4 1/2 1/4]:
  // H(f) = cos^2(pi fy) cos^2(pi fx) >= 0, so |F_syn| = (1 + g H) |F_real|
  // and both band errors are linear in g.
  const ImagePlane real = fixtures::noise_plane(24, 20, 18);
  const int H = real.height(), W = real.width();
  ImagePlane smooth(H, W);
  const double k[3] = {0.25, 0.5, 0.25};
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      double s = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) s += k[dy + 1] * k[dx + 1] * real.at((y + dy + H) % H, (x + dx + W) % W);
      smooth.at(y, x) = s;
    }
  auto errors = [&](double g) {
    ImagePlane syn(H, W);
    for (std::size_t i = 0; i < syn.size(); ++i) syn.samples()[i] = real.samples()[i] + g * smooth.samples()[i];
    return band_relative_error(real, syn);
  };
  const BandError base = errors(0.1);
  for (double g : {0.2, 0.35, 0.8}) {
    const BandError e = errors(g);
    EXPECT_NEAR(e.low_rel_err / base.low_rel_err, g / 0.1, 1e-9 * g / 0.1);
    EXPECT_NEAR(e.high_rel_err / base.high_rel_err, g / 0.1, 1e-9 * g / 0.1);
  }
}

TEST(BandError, Errors) {
  const ImagePlane a(8, 8, 1.0);
  EXPECT_EQ(code_of([&] { band_relative_error(a, ImagePlane(8, 9, 1.0)); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(code_of([&] { band_relative_error(a, a, 0.0); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(code_of([&] { band_relative_error(a, a, 1.0); }), ErrorCode::kOutOfRange);
  // A 1x1 plane has only the DC bin, so the high band is empty.
  EXPECT_EQ(code_of([] { band_relative_error(ImagePlane(1, 1, 1.0), ImagePlane(1, 1, 2.0)); }), ErrorCode::kEmptyBand);
}

TEST(ChannelModes, LumaAndPerChannel) {
  const ImageBuffer img = fixtures::noise_image(16, 16, 3, 19);
  const EnergyGrid luma = block_dct_energy(img);
  const EnergyGrid luma_direct = block_dct_energy(to_luma(img));
  EXPECT_EQ(luma.values, luma_direct.values);
  const EnergyGrid per = block_dct_energy(img, 8, ChannelMode::kPerChannel);
  double mean00 = 0;
  for (int c = 0; c < 3; ++c) mean00 += block_dct_energy(img.channel(c)).at(0, 0) / 3.0;
  EXPECT_NEAR(per.at(0, 0), mean00, 1e-9);
  const BandError self = band_relative_error(img, img, 0.5, ChannelMode::kPerChannel);
  EXPECT_EQ(self.high_rel_err, 0.0);
}

}  // namespace
}  // namespace dda::spectral
