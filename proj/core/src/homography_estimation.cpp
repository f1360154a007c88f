#include "kioskbot/homography_estimation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "kioskbot/error.hpp"

namespace kioskbot {

namespace {

// Similarity that moves the centroid to the origin and the mean distance to sqrt(2).
Eigen::Matrix3d normalizing_transform(std::span<const Point2> pts) {
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy);
  mean_dist /= static_cast<double>(pts.size());
  const double s = mean_dist > 0.0 ? std::sqrt(2.0) / mean_dist : 1.0;
  Eigen::Matrix3d t;
  t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
  return t;
}

double twice_area(Point2 a, Point2 b, Point2 c) {
  return std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

bool sample_degenerate(const std::array<Point2, 4>& p) {
  constexpr double kMinTwiceArea = 1.0;  // px^2; rejects near-collinear triples
  for (int i = 0; i < 4; ++i) {
    if (twice_area(p[(i + 1) % 4], p[(i + 2) % 4], p[(i + 3) % 4]) < kMinTwiceArea) return true;
  }
  return false;
}

bool reprojects_within(const Eigen::Matrix3d& m, Point2 from, Point2 to, double threshold_sq) {
  const double w = m(2, 0) * from.x + m(2, 1) * from.y + m(2, 2);
  if (std::abs(w) <= kProjectiveEpsilon) return false;
  const double u = (m(0, 0) * from.x + m(0, 1) * from.y + m(0, 2)) / w - to.x;
  const double v = (m(1, 0) * from.x + m(1, 1) * from.y + m(1, 2)) / w - to.y;
  return u * u + v * v < threshold_sq;
}

int count_inliers(const Eigen::Matrix3d& m, std::span<const Point2> from, std::span<const Point2> to,
                  double threshold_sq, std::vector<bool>* mask) {
  int n = 0;
  if (mask) mask->assign(from.size(), false);
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (reprojects_within(m, from[i], to[i], threshold_sq)) {
      ++n;
      if (mask) (*mask)[i] = true;
    }
  }
  return n;
}

}  // namespace

Homography fit_homography_dlt(std::span<const Point2> from, std::span<const Point2> to) {
  if (from.size() != to.size() || from.size() < 4) {
    throw Error(ErrorKind::DegenerateConfiguration, "DLT needs at least four correspondences");
  }
  const Eigen::Matrix3d t_from = normalizing_transform(from);
  const Eigen::Matrix3d t_to = normalizing_transform(to);
  Eigen::Matrix<double, 9, 9> ata = Eigen::Matrix<double, 9, 9>::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    const Eigen::Vector3d a = t_from * Eigen::Vector3d(from[i].x, from[i].y, 1.0);
    const Eigen::Vector3d b = t_to * Eigen::Vector3d(to[i].x, to[i].y, 1.0);
    Eigen::Matrix<double, 9, 1> r1, r2;
    r1 << -a.x(), -a.y(), -1.0, 0.0, 0.0, 0.0, b.x() * a.x(), b.x() * a.y(), b.x();
    r2 << 0.0, 0.0, 0.0, -a.x(), -a.y(), -1.0, b.y() * a.x(), b.y() * a.y(), b.y();
    ata.noalias() += r1 * r1.transpose();
    ata.noalias() += r2 * r2.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> eig(ata);
  const auto& evals = eig.eigenvalues();
  if (!(evals(1) > 1e-12 * evals(8))) {
    throw Error(ErrorKind::DegenerateConfiguration, "correspondences do not determine a homography");
  }
  const Eigen::Matrix<double, 9, 1> h = eig.eigenvectors().col(0);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return Homography(t_to.inverse() * hn * t_from);
}

HomographyEstimate estimate_homography(std::span<const MatchPair> matches,
                                       std::span<const Point2> query_points,
                                       std::span<const Point2> train_points,
                                       const RansacOptions& options) {
  const std::size_t n = matches.size();
  if (n < 4) throw Error(ErrorKind::DegenerateConfiguration, "at least four matches are required");
  std::vector<Point2> from(n), to(n);
  for (std::size_t i = 0; i < n; ++i) {
    from[i] = query_points[static_cast<std::size_t>(matches[i].query_idx)];
    to[i] = train_points[static_cast<std::size_t>(matches[i].train_idx)];
  }
  const double threshold_sq = options.threshold_px * options.threshold_px;

  // Every seeded hypothesis is scored; stopping early would make the winning
  // consensus depend on the threshold through the iteration count.
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  int best_count = 0;
  Eigen::Matrix3d best = Eigen::Matrix3d::Identity();
  for (int iter = 0; iter < options.max_iters; ++iter) {
    std::array<std::size_t, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      bool fresh = false;
      while (!fresh) {
        idx[k] = pick(rng);
        fresh = std::find(idx.begin(), idx.begin() + k, idx[k]) == idx.begin() + k;
      }
    }
    std::array<Point2, 4> sf{}, st{};
    for (int k = 0; k < 4; ++k) {
      sf[k] = from[idx[k]];
      st[k] = to[idx[k]];
    }
    if (sample_degenerate(sf) || sample_degenerate(st)) continue;
    Eigen::Matrix3d m;
    try {
      m = fit_homography_dlt(sf, st).matrix();
    } catch (const Error&) {
      continue;
    }
    const int count = count_inliers(m, from, to, threshold_sq, nullptr);
    if (count > best_count) {
      best_count = count;
      best = m;
      if (count == static_cast<int>(n)) break;
    }
  }
  if (best_count < std::max(options.min_inliers, 4)) {
    throw Error(ErrorKind::DegenerateConfiguration,
                "best hypothesis has " + std::to_string(best_count) + " inliers");
  }

  HomographyEstimate result{Homography(best), best_count, {}};
  count_inliers(best, from, to, threshold_sq, &result.inliers);
  std::vector<Point2> inl_from, inl_to;
  for (std::size_t i = 0; i < n; ++i) {
    if (result.inliers[i]) {
      inl_from.push_back(from[i]);
      inl_to.push_back(to[i]);
    }
  }
  try {
    result.homography = fit_homography_dlt(inl_from, inl_to);
  } catch (const Error&) {
    // Consensus set too degenerate to refit; keep the minimal-sample model.
  }
  return result;
}

HomographyEstimate estimate_homography(std::span<const MatchPair> matches,
                                       std::span<const Keypoint> query_kps,
                                       std::span<const Keypoint> train_kps,
                                       const RansacOptions& options) {
  std::vector<Point2> q(query_kps.size()), t(train_kps.size());
  std::transform(query_kps.begin(), query_kps.end(), q.begin(), [](const Keypoint& k) { return k.position; });
  std::transform(train_kps.begin(), train_kps.end(), t.begin(), [](const Keypoint& k) { return k.position; });
  return estimate_homography(matches, q, t, options);
}

}  // namespace kioskbot
