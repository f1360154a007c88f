#pragma once

// ORB-style binary features: FAST-9 segment-test corners ranked by Harris
// response, intensity-centroid orientation, and 256-bit steered BRIEF
// descriptors sampled on a Gaussian-smoothed patch.

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "kioskbot/geometry.hpp"
#include "kioskbot/image.hpp"

namespace kioskbot {

struct Keypoint {
  Point2 position;  // pixels
  double score = 0.0;
  double orientation_deg = 0.0;
};

struct Descriptor {
  std::array<std::uint64_t, 4> bits{};

  bool bit(int i) const { return (bits[i >> 6] >> (i & 63)) & 1u; }
  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

inline int hamming_distance(const Descriptor& a, const Descriptor& b) {
  return std::popcount(a.bits[0] ^ b.bits[0]) + std::popcount(a.bits[1] ^ b.bits[1]) +
         std::popcount(a.bits[2] ^ b.bits[2]) + std::popcount(a.bits[3] ^ b.bits[3]);
}

/// Parallel arrays; keypoints[i] is described by descriptors[i].
struct FeatureSet {
  std::vector<Keypoint> keypoints;
  std::vector<Descriptor> descriptors;

  std::size_t size() const { return keypoints.size(); }
  bool empty() const { return keypoints.empty(); }
};

struct DetectorOptions {
  int max_keypoints = 1000;
  int fast_threshold = 20;
  /// When > 0, keypoints are first thinned to an even quota per square cell.
  int grid_cell_px = 0;
};

/// Distance from the image border (and from invalid mask pixels) inside
/// which no keypoint is reported.
inline constexpr int kFeatureMargin = 20;

/// Results are ordered by descending score and are deterministic. Throws
/// ImageFormat for images smaller than 64x64.
FeatureSet detect_and_describe(const GrayImage& img, int max_keypoints);

/// `valid` (optional, same size as img, nonzero = usable) excludes keypoints
/// whose support region touches unusable pixels.
FeatureSet detect_and_describe(const GrayImage& img, const DetectorOptions& options,
                               std::span<const std::uint8_t> valid = {});

/// FAST-9 segment test at one pixel; exposed for tests.
bool is_fast_corner(const GrayImage& img, int x, int y, int threshold);

/// Harris response over a 7x7 window of Sobel gradients (k = 0.04).
double harris_response(const GrayImage& img, int x, int y);

}  // namespace kioskbot
