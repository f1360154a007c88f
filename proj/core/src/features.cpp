#include "kioskbot/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "kioskbot/error.hpp"

namespace kioskbot {

namespace {

// Bresenham circle of radius 3, clockwise from 12 o'clock.
constexpr std::array<std::array<int, 2>, 16> kCircle{{{0, -3}, {1, -3}, {2, -2}, {3, -1},
                                                      {3, 0},  {3, 1},  {2, 2},  {1, 3},
                                                      {0, 3},  {-1, 3}, {-2, 2}, {-3, 1},
                                                      {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}}};

constexpr int kOrientationRadius = 15;
constexpr int kPatternRadius = 13;
constexpr double kSmoothingSigma = 2.0;
constexpr int kOrientationBins = 30;

bool has_arc9(unsigned mask16) {
  unsigned m = mask16 | (mask16 << 16);
  unsigned run = m;
  for (int i = 1; i < 9; ++i) run &= m >> i;
  return run != 0;
}

// Segment-test score: summed contrast beyond threshold on the winning side,
// or 0 when the pixel is not a corner.
int fast_score(const std::uint8_t* p, const std::array<int, 16>& offsets, int t) {
  const int c = *p;
  const int hi = c + t;
  const int lo = c - t;
  // Compass pixels 0, 4, 8, 12: any 9-arc covers at least two of them.
  int nb = 0, nd = 0;
  for (int k = 0; k < 16; k += 4) {
    const int v = p[offsets[k]];
    nb += v > hi;
    nd += v < lo;
  }
  if (nb < 2 && nd < 2) return 0;
  unsigned bright = 0, dark = 0;
  int sb = 0, sd = 0;
  for (int k = 0; k < 16; ++k) {
    const int v = p[offsets[k]];
    if (v > hi) {
      bright |= 1u << k;
      sb += v - hi;
    } else if (v < lo) {
      dark |= 1u << k;
      sd += lo - v;
    }
  }
  int score = 0;
  if (has_arc9(bright)) score = std::max(score, sb);
  if (has_arc9(dark)) score = std::max(score, sd);
  return score;
}

struct PatternPoint {
  int x, y;
};
using Pattern = std::array<std::array<PatternPoint, 2>, 256>;

double canonical(std::mt19937& rng) { return (static_cast<double>(rng()) + 0.5) / 4294967296.0; }

// Fixed test-pair layout: isotropic Gaussian (sigma = patch/5) clipped to
// the pattern radius, generated from a fixed mt19937 stream.
std::array<std::array<std::array<double, 2>, 2>, 256> base_pattern() {
  std::mt19937 rng(0x5eed1234u);
  const double sigma = 31.0 / 5.0;
  std::array<std::array<std::array<double, 2>, 2>, 256> pairs{};
  for (auto& pair : pairs) {
    for (auto& pt : pair) {
      for (;;) {
        const double u1 = canonical(rng), u2 = canonical(rng);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double x = sigma * rad * std::cos(2.0 * std::numbers::pi * u2);
        const double y = sigma * rad * std::sin(2.0 * std::numbers::pi * u2);
        if (std::hypot(x, y) <= kPatternRadius) {
          pt = {x, y};
          break;
        }
      }
    }
  }
  return pairs;
}

const std::array<Pattern, kOrientationBins>& steered_patterns() {
  static const auto patterns = [] {
    const auto base = base_pattern();
    std::array<Pattern, kOrientationBins> out{};
    for (int b = 0; b < kOrientationBins; ++b) {
      const double a = 2.0 * std::numbers::pi * b / kOrientationBins;
      const double ca = std::cos(a), sa = std::sin(a);
      for (int i = 0; i < 256; ++i) {
        for (int j = 0; j < 2; ++j) {
          const double x = base[i][j][0], y = base[i][j][1];
          out[b][i][j] = {static_cast<int>(std::lround(ca * x - sa * y)),
                          static_cast<int>(std::lround(sa * x + ca * y))};
        }
      }
    }
    return out;
  }();
  return patterns;
}

double orientation_deg(const GrayImage& img, int cx, int cy) {
  double m10 = 0.0, m01 = 0.0;
  for (int dy = -kOrientationRadius; dy <= kOrientationRadius; ++dy) {
    const int span = static_cast<int>(std::sqrt(kOrientationRadius * kOrientationRadius - dy * dy));
    const std::uint8_t* r = img.row(cy + dy) + cx;
    int sum_x = 0, sum = 0;
    for (int dx = -span; dx <= span; ++dx) {
      sum_x += dx * r[dx];
      sum += r[dx];
    }
    m10 += sum_x;
    m01 += static_cast<double>(dy) * sum;
  }
  return normalize_degrees(rad_to_deg(std::atan2(m01, m10)));
}

Descriptor describe(const FloatImage& smooth, int cx, int cy, double angle_deg) {
  const int bin = static_cast<int>(std::lround(angle_deg * kOrientationBins / 360.0)) % kOrientationBins;
  const auto& pattern = steered_patterns()[bin];
  const float* center = smooth.data.data() + static_cast<std::size_t>(cy) * smooth.width + cx;
  const int w = smooth.width;
  Descriptor d;
  for (int i = 0; i < 256; ++i) {
    const auto& [a, b] = pattern[i];
    if (center[a.y * w + a.x] < center[b.y * w + b.x]) d.bits[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
  return d;
}

struct Candidate {
  int x, y;
  double score;
};

bool by_score(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.y != b.y) return a.y < b.y;
  return a.x < b.x;
}

}  // namespace

bool is_fast_corner(const GrayImage& img, int x, int y, int threshold) {
  if (x < 3 || y < 3 || x >= img.width() - 3 || y >= img.height() - 3) return false;
  std::array<int, 16> offsets{};
  for (int k = 0; k < 16; ++k) offsets[k] = kCircle[k][1] * img.width() + kCircle[k][0];
  return fast_score(img.row(y) + x, offsets, threshold) > 0;
}

double harris_response(const GrayImage& img, int x, int y) {
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int dy = -3; dy <= 3; ++dy) {
    const std::uint8_t* up = img.row(y + dy - 1) + x;
    const std::uint8_t* mid = img.row(y + dy) + x;
    const std::uint8_t* dn = img.row(y + dy + 1) + x;
    for (int dx = -3; dx <= 3; ++dx) {
      const int i = dx;
      const double gx = (up[i + 1] - up[i - 1]) + 2.0 * (mid[i + 1] - mid[i - 1]) + (dn[i + 1] - dn[i - 1]);
      const double gy = (dn[i - 1] - up[i - 1]) + 2.0 * (dn[i] - up[i]) + (dn[i + 1] - up[i + 1]);
      sxx += gx * gx;
      syy += gy * gy;
      sxy += gx * gy;
    }
  }
  // Normalize by window size and Sobel gain so scores stay in a readable range.
  const double norm = 1.0 / (49.0 * 16.0);
  sxx *= norm;
  syy *= norm;
  sxy *= norm;
  const double tr = sxx + syy;
  return sxx * syy - sxy * sxy - 0.04 * tr * tr;
}

FeatureSet detect_and_describe(const GrayImage& img, int max_keypoints) {
  DetectorOptions options;
  options.max_keypoints = max_keypoints;
  return detect_and_describe(img, options);
}

FeatureSet detect_and_describe(const GrayImage& img, const DetectorOptions& options,
                               std::span<const std::uint8_t> valid) {
  if (img.width() < 64 || img.height() < 64) {
    throw Error(ErrorKind::ImageFormat, "feature detection needs at least 64x64 pixels");
  }
  if (!valid.empty() && valid.size() != img.pixels().size()) {
    throw Error(ErrorKind::ImageFormat, "validity mask does not match image size");
  }
  const int w = img.width(), h = img.height();
  FeatureSet out;
  if (options.max_keypoints <= 0) return out;

  // Integral image of invalid pixels for O(1) support-window checks.
  std::vector<int> invalid_sum;
  if (!valid.empty()) {
    invalid_sum.assign(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    for (int y = 0; y < h; ++y) {
      int row_sum = 0;
      for (int x = 0; x < w; ++x) {
        row_sum += valid[static_cast<std::size_t>(y) * w + x] == 0;
        invalid_sum[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
            invalid_sum[static_cast<std::size_t>(y) * (w + 1) + x + 1] + row_sum;
      }
    }
  }
  auto support_valid = [&](int x, int y) {
    if (invalid_sum.empty()) return true;
    const int x0 = x - kFeatureMargin, x1 = x + kFeatureMargin + 1;
    const int y0 = y - kFeatureMargin, y1 = y + kFeatureMargin + 1;
    const auto at = [&](int xx, int yy) { return invalid_sum[static_cast<std::size_t>(yy) * (w + 1) + xx]; };
    return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0) == 0;
  };

  std::array<int, 16> offsets{};
  for (int k = 0; k < 16; ++k) offsets[k] = kCircle[k][1] * w + kCircle[k][0];

  // Segment-test scores over the detectable interior (margin leaves room for
  // the 3x3 suppression neighbourhood).
  const int lo = kFeatureMargin, hi_x = w - kFeatureMargin, hi_y = h - kFeatureMargin;
  if (hi_x <= lo || hi_y <= lo) return out;
  std::vector<int> score(static_cast<std::size_t>(w) * h, 0);
  for (int y = lo - 1; y < hi_y + 1; ++y) {
    const std::uint8_t* r = img.row(y);
    int* s = score.data() + static_cast<std::size_t>(y) * w;
    for (int x = lo - 1; x < hi_x + 1; ++x) s[x] = fast_score(r + x, offsets, options.fast_threshold);
  }

  std::vector<Candidate> candidates;
  for (int y = lo; y < hi_y; ++y) {
    const int* s = score.data() + static_cast<std::size_t>(y) * w;
    for (int x = lo; x < hi_x; ++x) {
      const int v = s[x];
      if (v == 0) continue;
      // 3x3 suppression; ties broken towards the earlier pixel in raster order.
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        const int* sn = s + dy * w;
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int n = sn[x + dx];
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (n > v || (n == v && earlier)) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max || !support_valid(x, y)) continue;
      const double harris = harris_response(img, x, y);
      if (harris <= 0.0) continue;
      candidates.push_back({x, y, harris});
    }
  }

  std::sort(candidates.begin(), candidates.end(), by_score);
  if (options.grid_cell_px > 0 && static_cast<int>(candidates.size()) > options.max_keypoints) {
    const int cell = options.grid_cell_px;
    const int cols = (w + cell - 1) / cell, rows = (h + cell - 1) / cell;
    const int quota = std::max(1, (options.max_keypoints + cols * rows - 1) / (cols * rows));
    std::vector<int> taken(static_cast<std::size_t>(cols) * rows, 0);
    std::vector<Candidate> kept;
    for (const auto& c : candidates) {
      int& n = taken[static_cast<std::size_t>(c.y / cell) * cols + c.x / cell];
      if (n < quota) {
        ++n;
        kept.push_back(c);
      }
    }
    candidates = std::move(kept);
  }
  if (static_cast<int>(candidates.size()) > options.max_keypoints) candidates.resize(options.max_keypoints);

  const FloatImage smooth = gaussian_blur(to_float(img), kSmoothingSigma);
  out.keypoints.reserve(candidates.size());
  out.descriptors.reserve(candidates.size());
  for (const auto& c : candidates) {
    const double angle = orientation_deg(img, c.x, c.y);
    out.keypoints.push_back({{static_cast<double>(c.x), static_cast<double>(c.y)}, c.score, angle});
    out.descriptors.push_back(describe(smooth, c.x, c.y, angle));
  }
  return out;
}

}  // namespace kioskbot
