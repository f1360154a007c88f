#include "kioskbot/image.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "kioskbot/error.hpp"

namespace kioskbot {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : GrayImage(width, height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                              std::max(height, 0),
                                          fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < kMinSide || height < kMinSide) {
    throw Error(ErrorKind::ImageFormat, "image must be at least 32x32, got " +
                                           std::to_string(width) + "x" + std::to_string(height));
  }
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorKind::ImageFormat, "pixel buffer size does not match dimensions");
  }
}

double GrayImage::sample(double x, double y, double outside) const {
  if (!(x >= 0.0 && y >= 0.0 && x <= width_ - 1 && y <= height_ - 1)) return outside;
  const int x0 = std::min(static_cast<int>(x), width_ - 2);
  const int y0 = std::min(static_cast<int>(y), height_ - 2);
  const double tx = x - x0;
  const double ty = y - y0;
  const std::uint8_t* r0 = row(y0) + x0;
  const std::uint8_t* r1 = row(y0 + 1) + x0;
  return (1 - ty) * ((1 - tx) * r0[0] + tx * r0[1]) + ty * ((1 - tx) * r1[0] + tx * r1[1]);
}

FloatImage to_float(const GrayImage& img) {
  FloatImage out{img.width(), img.height(), {}};
  out.data.assign(img.pixels().begin(), img.pixels().end());
  return out;
}

GrayImage to_gray(const FloatImage& img) {
  std::vector<std::uint8_t> px(img.data.size());
  std::transform(img.data.begin(), img.data.end(), px.begin(), [](float v) {
    return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5f), 0.0f, 255.0f));
  });
  return GrayImage(img.width, img.height, std::move(px));
}

FloatImage gaussian_blur(const FloatImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<float> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = static_cast<float>(std::exp(-0.5 * i * i / (sigma * sigma)));
    sum += kernel[i + radius];
  }
  for (auto& k : kernel) k = static_cast<float>(k / sum);

  const int w = img.width, h = img.height;
  FloatImage tmp{w, h, std::vector<float>(img.data.size())};
  for (int y = 0; y < h; ++y) {
    const float* src = img.data.data() + static_cast<std::size_t>(y) * w;
    float* dst = tmp.data.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      float acc = 0.0f;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * src[std::clamp(x + k, 0, w - 1)];
      }
      dst[x] = acc;
    }
  }
  FloatImage out{w, h, std::vector<float>(img.data.size())};
  for (int y = 0; y < h; ++y) {
    float* dst = out.data.data() + static_cast<std::size_t>(y) * w;
    for (int k = -radius; k <= radius; ++k) {
      const float* src = tmp.data.data() + static_cast<std::size_t>(std::clamp(y + k, 0, h - 1)) * w;
      const float kv = kernel[k + radius];
      for (int x = 0; x < w; ++x) dst[x] += kv * src[x];
    }
  }
  return out;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  return to_gray(gaussian_blur(to_float(img), sigma));
}

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorKind::ImageFormat, std::string("cannot read PNG: ") + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::ImageFormat, "cannot decode PNG: " + msg);
  }
  if (!color) return GrayImage(w, h, std::move(buffer));
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = luminance(buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]);
  }
  return GrayImage(w, h, std::move(gray));
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels().data(), 0, nullptr)) {
    throw Error(ErrorKind::ImageFormat, std::string("cannot size PNG: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.pixels().data(), 0, nullptr)) {
    throw Error(ErrorKind::ImageFormat, std::string("cannot encode PNG: ") + image.message);
  }
  out.resize(size);
  return out;
}

GrayImage read_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_png(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_png(const GrayImage& img, const std::filesystem::path& path) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw Error(ErrorKind::ImageFormat, "base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorKind::ImageFormat, "malformed base64");
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

}  // namespace kioskbot
