#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace kioskbot {

/// Row-major 8-bit luminance raster. Pixel (x, y) covers the unit square
/// [x, x+1) x [y, y+1); its sample sits at the integer coordinate (x, y).
class GrayImage {
 public:
  static constexpr int kMinSide = 32;

  GrayImage() = default;
  /// Throws ImageFormat when either side is below kMinSide.
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::uint8_t at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const std::uint8_t* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }

  std::span<const std::uint8_t> pixels() const { return data_; }
  std::span<std::uint8_t> pixels() { return data_; }

  /// Bilinear sample; returns `outside` when any of the four taps is off-image.
  double sample(double x, double y, double outside = 0.0) const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Float copy of an image, used for filtering without intermediate rounding.
struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

FloatImage to_float(const GrayImage& img);
/// Rounds half-up and clamps into [0, 255].
GrayImage to_gray(const FloatImage& img);

/// Separable Gaussian with clamped borders; sigma <= 0 is a copy.
FloatImage gaussian_blur(const FloatImage& img, double sigma);
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// 0.299 R + 0.587 G + 0.114 B, rounded half-up, computed exactly in integers.
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Decodes any PNG; color inputs are reduced with luminance(). Throws ImageFormat.
GrayImage decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const GrayImage& img);
GrayImage read_png(const std::filesystem::path& path);
void write_png(const GrayImage& img, const std::filesystem::path& path);

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws ImageFormat on malformed input.
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace kioskbot
