#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "kioskbot/error.hpp"
#include "kioskbot/image.hpp"
#include <png.h>

namespace kioskbot {
namespace {

GrayImage random_image(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GrayImage img(w, h);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng());
  return img;
}

TEST(GrayImage, MinimumSize) {
  EXPECT_THROW(GrayImage(31, 64), Error);
  EXPECT_THROW(GrayImage(64, 10), Error);
  EXPECT_THROW(GrayImage(40, 40, std::vector<std::uint8_t>(10)), Error);
  EXPECT_NO_THROW(GrayImage(32, 32));
}

TEST(GrayImage, BilinearSample) {
  GrayImage img(32, 32, 0);
  img.at(3, 4) = 100;
  img.at(4, 4) = 200;
  img.at(3, 5) = 0;
  img.at(4, 5) = 50;
  // Hand-computed: top row 100 + 0.25*100 = 125, bottom 12.5; lerp 0.5 -> 68.75.
  EXPECT_DOUBLE_EQ(img.sample(3.25, 4.5), 68.75);
  EXPECT_DOUBLE_EQ(img.sample(3.0, 4.0), 100.0);
  EXPECT_DOUBLE_EQ(img.sample(-0.1, 4.0, 7.0), 7.0);
  EXPECT_DOUBLE_EQ(img.sample(31.5, 4.0, 7.0), 7.0);
}

TEST(Luminance, RoundsHalfUp) {
  EXPECT_EQ(luminance(255, 255, 255), 255);
  EXPECT_EQ(luminance(0, 0, 0), 0);
  EXPECT_EQ(luminance(255, 0, 0), 76);   // 76.245
  EXPECT_EQ(luminance(0, 255, 0), 150);  // 149.685
  EXPECT_EQ(luminance(0, 0, 255), 29);   // 29.07
  // Exhaustive against exact rational arithmetic on a coarse lattice.
  for (int r = 0; r < 256; r += 5)
    for (int g = 0; g < 256; g += 7)
      for (int b = 0; b < 256; b += 11) {
        const long num = 299L * r + 587L * g + 114L * b;  // value * 1000
        const long expected = (num + 500) / 1000;
        ASSERT_EQ(luminance(r, g, b), expected) << r << "," << g << "," << b;
      }
}

TEST(Filters, GrayRoundingAndClamp) {
  FloatImage f{32, 32, std::vector<float>(32 * 32, 10.5f)};
  f.data[0] = -4.0f;
  f.data[1] = 300.0f;
  f.data[2] = 10.49f;
  const GrayImage g = to_gray(f);
  EXPECT_EQ(g.at(0, 0), 0);
  EXPECT_EQ(g.at(1, 0), 255);
  EXPECT_EQ(g.at(2, 0), 10);
  EXPECT_EQ(g.at(3, 0), 11);
}

TEST(Filters, BlurPreservesConstantAndMass) {
  const GrayImage flat(48, 40, 123);
  EXPECT_EQ(gaussian_blur(flat, 2.0), flat);
  EXPECT_EQ(gaussian_blur(flat, 0.0), flat);
  FloatImage impulse{64, 64, std::vector<float>(64 * 64, 0.0f)};
  impulse.data[32 * 64 + 32] = 1000.0f;
  const FloatImage out = gaussian_blur(impulse, 1.5);
  double sum = 0.0;
  for (float v : out.data) sum += v;
  EXPECT_NEAR(sum, 1000.0, 1e-2);
  EXPECT_NEAR(out.at(31, 32), out.at(33, 32), 1e-4);
  EXPECT_NEAR(out.at(32, 31), out.at(32, 33), 1e-4);
  EXPECT_GT(out.at(32, 32), out.at(33, 32));
}

TEST(Png, RoundTrip) {
  const GrayImage img = random_image(67, 45, 5);
  EXPECT_EQ(decode_png(encode_png(img)), img);
  const auto path = std::filesystem::temp_directory_path() / "kioskbot_png_roundtrip.png";
  write_png(img, path);
  EXPECT_EQ(read_png(path), img);
  std::filesystem::remove(path);
}

TEST(Png, ColorInputUsesLuminance) {
  // An RGB PNG written directly with libpng.
  const int w = 32, h = 32;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
  for (int i = 0; i < w * h; ++i) {
    rgb[3 * i] = static_cast<std::uint8_t>(i * 7);
    rgb[3 * i + 1] = static_cast<std::uint8_t>(i * 13);
    rgb[3 * i + 2] = static_cast<std::uint8_t>(i * 3);
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = w;
  image.height = h;
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  ASSERT_TRUE(png_image_write_to_memory(&image, nullptr, &size, 0, rgb.data(), 0, nullptr));
  std::vector<std::uint8_t> bytes(size);
  ASSERT_TRUE(png_image_write_to_memory(&image, bytes.data(), &size, 0, rgb.data(), 0, nullptr));
  const GrayImage g = decode_png(bytes);
  for (int i = 0; i < w * h; ++i)
    ASSERT_EQ(g.pixels()[i], luminance(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]));
}

TEST(Png, Garbage) {
  const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
  try {
    decode_png(junk);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ImageFormat);
  }
}

TEST(Base64, KnownVectors) {
  const auto enc = [](std::string s) {
    return base64_encode(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  };
  EXPECT_EQ(enc(""), "");
  EXPECT_EQ(enc("f"), "Zg==");
  EXPECT_EQ(enc("fo"), "Zm8=");
  EXPECT_EQ(enc("foo"), "Zm9v");
  EXPECT_EQ(enc("foobar"), "Zm9vYmFy");
  const auto dec = base64_decode("Zm9vYmE=");
  EXPECT_EQ(std::string(dec.begin(), dec.end()), "fooba");
  EXPECT_THROW(base64_decode("Zm9*"), Error);
  EXPECT_THROW(base64_decode("Zm9"), Error);
}

TEST(Base64, RoundTripRandom) {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 64; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
  }
}

}  // namespace
}  // namespace kioskbot
