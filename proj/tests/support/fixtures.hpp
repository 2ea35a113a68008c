#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dda/align.hpp"
#include "dda/image.hpp"
#include "dda/image_io.hpp"
#include "dda/jpeg_codec.hpp"
#include "dda/rng.hpp"

namespace dda::fixtures {

inline ImageBuffer noise_image(int height, int width, int channels, std::uint64_t seed) {
  Rng rng(seed);
  ImageBuffer img(height, width, channels);
  for (double& s : img.samples()) s = std::floor(rng.uniform01() * 256.0);
  return img;
}

// Mid-gray noise of limited amplitude. Full-range noise is a poor stand-in
// for image texture: its quantization error adds more high-band energy than
// JPEG removes.
inline ImageBuffer grain_image(int height, int width, int channels, std::uint64_t seed, double amplitude = 24.0) {
  Rng rng(seed);
  ImageBuffer img(height, width, channels);
  for (double& s : img.samples()) s = std::round(128.0 + amplitude * (2.0 * rng.uniform01() - 1.0));
  return img;
}

inline ImagePlane noise_plane(int height, int width, std::uint64_t seed, double lo = 0.0, double hi = 255.0) {
  Rng rng(seed);
  ImagePlane plane(height, width);
  for (double& s : plane.samples()) s = lo + (hi - lo) * rng.uniform01();
  return plane;
}

// Smooth content (gradients, a few low-frequency waves) plus fine grain,
// loosely photo-like. Integer valued.
inline ImageBuffer scene_image(int height, int width, std::uint64_t seed, double grain = 10.0) {
  Rng rng(seed);
  constexpr double kPi = 3.14159265358979323846;
  struct Wave {
    double fy, fx, phase, amp;
  };
  std::vector<Wave> waves[3];
  double base[3];
  for (int c = 0; c < 3; ++c) {
    base[c] = 60.0 + 120.0 * rng.uniform01();
    for (int k = 0; k < 4; ++k) {
      waves[c].push_back({(rng.uniform01() - 0.5) * 0.15, (rng.uniform01() - 0.5) * 0.15, rng.uniform01() * 2 * kPi,
                          10.0 + 25.0 * rng.uniform01()});
    }
  }
  const double gy = (rng.uniform01() - 0.5) * 60.0 / height;
  const double gx = (rng.uniform01() - 0.5) * 60.0 / width;
  ImageBuffer img(height, width, 3);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double g = grain * (rng.uniform01() - 0.5) * 2.0;
      for (int c = 0; c < 3; ++c) {
        double v = base[c] + gy * y + gx * x + g;
        for (const auto& w : waves[c]) v += w.amp * std::sin(2 * kPi * (w.fy * y + w.fx * x) + w.phase);
        img.at(y, x, c) = std::clamp(std::round(v), 0.0, 255.0);
      }
    }
  }
  return img;
}

inline ImageBuffer constant_image(int height, int width, int channels, double value) {
  return ImageBuffer(height, width, channels, value);
}

// 3x3 box blur with clamped edges.
inline ImageBuffer box_blur3(const ImageBuffer& img) {
  ImageBuffer out(img.height(), img.width(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        double sum = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int yy = std::clamp(y + dy, 0, img.height() - 1);
            const int xx = std::clamp(x + dx, 0, img.width() - 1);
            sum += img.at(yy, xx, c);
          }
        }
        out.at(y, x, c) = sum / 9.0;
      }
    }
  }
  return out;
}

// A reconstruction-like stand-in: the source with faint decoder-style
// grain and no compression traces.
inline ImageBuffer stand_in_recon(const ImageBuffer& source, std::uint64_t seed) {
  ImageBuffer out = source;
  Rng rng(seed);
  for (double& s : out.samples()) s = std::clamp(std::round(s + 2.0 * (rng.uniform01() - 0.5) * 2.0), 0.0, 255.0);
  return out;
}

struct CorpusPair {
  std::string id;
  std::filesystem::path real;
  std::filesystem::path recon;
};

// real/<id>.jpg = source encoded at `quality`, recon/<id>.png = the
// uncompressed source. Sizes are multiples of 8 in [64, 128].
inline std::vector<CorpusPair> write_corpus(const std::filesystem::path& root, int count, std::uint64_t seed,
                                            int quality = 85) {
  std::vector<CorpusPair> pairs;
  Rng sizes(seed ^ 0x5a5a5a5aULL);
  for (int i = 0; i < count; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "img%03d", i);
    const int h = 64 + 8 * static_cast<int>(sizes.uniform01() * 9);
    const int w = 64 + 8 * static_cast<int>(sizes.uniform01() * 9);
    const ImageBuffer source = scene_image(h, w, seed * 1000 + i);
    CorpusPair p{id, root / "real" / (std::string(id) + ".jpg"), root / "recon" / (std::string(id) + ".png")};
    write_file(p.real, jpeg::encode_jpeg(source, quality));
    write_file(p.recon, encode_png(source));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

inline double max_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
  double m = 0.0;
  auto x = a.samples();
  auto y = b.samples();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

inline double rms_diff(const ImageBuffer& a, const ImageBuffer& b) {
  double s = 0.0;
  auto x = a.samples();
  auto y = b.samples();
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s / static_cast<double>(x.size()));
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("dda_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace dda::fixtures
