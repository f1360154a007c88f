#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kioskbot/features.hpp"
#include "kioskbot/geometry.hpp"
#include "kioskbot/matching.hpp"

namespace kioskbot {

struct RansacOptions {
  double threshold_px = 3.0;
  int max_iters = 1000;
  int min_inliers = 15;
  std::uint64_t seed = 0;
};

struct HomographyEstimate {
  /// Maps query positions onto train positions; the DLT refit over `inliers`.
  Homography homography;
  /// Consensus size of the best minimal-sample hypothesis.
  int inlier_count = 0;
  /// inliers[i] refers to matches[i]: within threshold_px of that hypothesis.
  std::vector<bool> inliers;
};

/// Normalized DLT over all correspondences (at least four). Throws
/// DegenerateConfiguration when the system is rank deficient.
Homography fit_homography_dlt(std::span<const Point2> from, std::span<const Point2> to);

/// RANSAC over max_iters seeded 4-point minimal samples (stopping early only
/// when one explains every match), then a DLT refit over the winner's
/// consensus set. Reprojection error is measured in the train image. Throws
/// DegenerateConfiguration for fewer than four matches or when no
/// hypothesis reaches options.min_inliers.
HomographyEstimate estimate_homography(std::span<const MatchPair> matches,
                                       std::span<const Point2> query_points,
                                       std::span<const Point2> train_points,
                                       const RansacOptions& options = {});

/// Convenience overload taking keypoint lists.
HomographyEstimate estimate_homography(std::span<const MatchPair> matches,
                                       std::span<const Keypoint> query_kps,
                                       std::span<const Keypoint> train_kps,
                                       const RansacOptions& options = {});

}  // namespace kioskbot
