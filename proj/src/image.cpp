#include "dda/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dda/error.hpp"

namespace dda {

namespace {

void check_dims(int height, int width) {
  if (height <= 0 || width <= 0) {
    throw Error(ErrorCode::kOutOfRange,
                "image dimensions must be positive, got " + std::to_string(height) + "x" + std::to_string(width));
  }
}

}  // namespace

ImagePlane::ImagePlane(int height, int width, double fill)
    : height_(height), width_(width) {
  check_dims(height, width);
  samples_.assign(static_cast<std::size_t>(height) * width, fill);
}

ImagePlane::ImagePlane(int height, int width, std::vector<double> samples)
    : height_(height), width_(width), samples_(std::move(samples)) {
  check_dims(height, width);
  if (samples_.size() != static_cast<std::size_t>(height) * width) {
    throw Error(ErrorCode::kShapeMismatch, "sample count does not match plane dimensions");
  }
}

bool ImagePlane::all_finite() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); });
}

ImageBuffer::ImageBuffer(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width);
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kOutOfRange, "channel count must be 1 or 3, got " + std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

ImagePlane ImageBuffer::channel(int c) const {
  ImagePlane plane(height_, width_);
  auto out = plane.samples();
  const std::size_t n = static_cast<std::size_t>(height_) * width_;
  for (std::size_t i = 0; i < n; ++i) out[i] = data_[i * channels_ + c];
  return plane;
}

void ImageBuffer::set_channel(int c, const ImagePlane& plane) {
  if (plane.height() != height_ || plane.width() != width_) {
    throw Error(ErrorCode::kShapeMismatch, "plane does not match image dimensions");
  }
  auto in = plane.samples();
  for (std::size_t i = 0; i < in.size(); ++i) data_[i * channels_ + c] = in[i];
}

ImageBuffer ImageBuffer::from_u8(int height, int width, int channels, std::span<const std::uint8_t> bytes) {
  ImageBuffer image(height, width, channels);
  if (bytes.size() != image.data_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "byte count does not match image dimensions");
  }
  std::copy(bytes.begin(), bytes.end(), image.data_.begin());
  return image;
}

std::vector<std::uint8_t> ImageBuffer::to_u8() const {
  std::vector<std::uint8_t> out(data_.size());
  std::transform(data_.begin(), data_.end(), out.begin(), quantize_u8);
  return out;
}

std::uint8_t quantize_u8(double value) noexcept {
  if (!(value > 0.0)) return 0;  // also maps NaN to 0
  if (value >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::round(value));
}

ImageBuffer quantize_image(const ImageBuffer& image) {
  ImageBuffer out = image;
  for (double& v : out.samples()) v = quantize_u8(v);
  return out;
}

ImagePlane to_luma(const ImageBuffer& image) {
  if (image.channels() == 1) return image.channel(0);
  ImagePlane luma(image.height(), image.width());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      luma.at(y, x) = 0.299 * image.at(y, x, 0) + 0.587 * image.at(y, x, 1) + 0.114 * image.at(y, x, 2);
    }
  }
  return luma;
}

ImageBuffer gray_to_rgb(const ImageBuffer& image) {
  if (image.channels() == 3) return image;
  ImageBuffer out(image.height(), image.width(), 3);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const double v = image.at(y, x, 0);
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = v;
    }
  }
  return out;
}

}  // namespace dda
