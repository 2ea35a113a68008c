#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dda {

/// Single-channel raster of doubles, row-major.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int height, int width, double fill = 0.0);
  ImagePlane(int height, int width, std::vector<double> samples);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  double& at(int y, int x) { return samples_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int y, int x) const { return samples_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<double> samples() noexcept { return samples_; }
  std::span<const double> samples() const noexcept { return samples_; }

  bool all_finite() const noexcept;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> samples_;
};

/// Interleaved (HWC) raster with 1 or 3 channels. Pixel data uses the 8-bit
/// scale [0,255]; values stay floating point until an output boundary.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int height, int width, int channels, double fill = 0.0);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int y, int x, int c) { return data_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return data_[index(y, x, c)]; }

  std::span<double> samples() noexcept { return data_; }
  std::span<const double> samples() const noexcept { return data_; }

  bool same_shape(const ImageBuffer& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  ImagePlane channel(int c) const;
  void set_channel(int c, const ImagePlane& plane);

  static ImageBuffer from_u8(int height, int width, int channels, std::span<const std::uint8_t> bytes);
  /// Rounds half away from zero and clamps to [0,255].
  std::vector<std::uint8_t> to_u8() const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int y, int x, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

std::uint8_t quantize_u8(double value) noexcept;

/// Returns a copy with every sample rounded half away from zero and clamped to [0,255].
ImageBuffer quantize_image(const ImageBuffer& image);

/// BT.601 luma (0.299 R + 0.587 G + 0.114 B); single-channel input is returned as-is.
ImagePlane to_luma(const ImageBuffer& image);

/// Replicates a grayscale image into three channels.
ImageBuffer gray_to_rgb(const ImageBuffer& image);

}  // namespace dda
