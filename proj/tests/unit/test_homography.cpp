#include <gtest/gtest.h>

#include <random>

#include "kioskbot/error.hpp"
#include "kioskbot/homography_estimation.hpp"

namespace kioskbot {
namespace {

Homography random_homography(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix3d m;
  m << 1 + 0.15 * n(rng), 0.15 * n(rng), 40 * n(rng), 0.15 * n(rng), 1 + 0.15 * n(rng), 40 * n(rng),
      2e-4 * n(rng), 2e-4 * n(rng), 1;
  return Homography(m);
}

struct Problem {
  Homography truth;
  std::vector<Point2> query, train, clean_query;
  std::vector<MatchPair> matches;
  int true_count = 0;
};

// `inliers` true correspondences (train side noised by sigma px) followed by
// `outliers` uniform pairs, shuffled into the match list.
Problem make_problem(std::uint64_t seed, int inliers, int outliers, double sigma) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0, 640), uy(0, 480);
  std::normal_distribution<double> noise(0.0, sigma > 0 ? sigma : 1.0);
  Problem p;
  p.truth = random_homography(rng);
  for (int i = 0; i < inliers + outliers; ++i) {
    const Point2 q{ux(rng), uy(rng)};
    Point2 t = i < inliers ? apply_homography(p.truth, q) : Point2{ux(rng), uy(rng)};
    if (i < inliers && sigma > 0) t = t + Point2{noise(rng), noise(rng)};
    p.query.push_back(q);
    p.train.push_back(t);
  }
  p.clean_query.assign(p.query.begin(), p.query.begin() + inliers);
  p.true_count = inliers;
  for (int i = 0; i < inliers + outliers; ++i) p.matches.push_back({i, i, 0});
  std::shuffle(p.matches.begin(), p.matches.end(), rng);
  return p;
}

double mean_reprojection(const Homography& est, const Problem& p) {
  double sum = 0.0;
  for (const Point2 q : p.clean_query) sum += distance(apply_homography(est, q), apply_homography(p.truth, q));
  return sum / static_cast<double>(p.clean_query.size());
}

TEST(Dlt, ExactFromGenerator) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Homography h = random_homography(rng);
    std::vector<Point2> from, to;
    for (int i = 0; i < 40; ++i) {
      from.push_back({std::uniform_real_distribution<double>(0, 640)(rng), std::uniform_real_distribution<double>(0, 480)(rng)});
      to.push_back(apply_homography(h, from.back()));
    }
    const Homography est = fit_homography_dlt(from, to);
    for (std::size_t i = 0; i < from.size(); ++i) EXPECT_LT(distance(apply_homography(est, from[i]), to[i]), 1e-6);
    const Eigen::Matrix3d a = est.matrix() / est.matrix().norm(), b = h.matrix() / h.matrix().norm();
    EXPECT_LT(std::min((a - b).norm(), (a + b).norm()), 1e-9);
  }
}

TEST(Dlt, Degenerate) {
  const std::vector<Point2> line{{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}};
  EXPECT_THROW(fit_homography_dlt(line, line), Error);
  const std::vector<Point2> three{{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(fit_homography_dlt(three, three), Error);
}

TEST(Ransac, ZeroNoiseForty) {
  const Problem p = make_problem(3, 40, 0, 0.0);
  const HomographyEstimate e = estimate_homography(p.matches, p.query, p.train);
  EXPECT_EQ(e.inlier_count, 40);
  for (const Point2 q : p.clean_query) EXPECT_LT(distance(apply_homography(e.homography, q), apply_homography(p.truth, q)), 0.1);
}

TEST(Ransac, IdentityCorrespondences) {
  std::vector<Point2> pts;
  for (int i = 0; i < 30; ++i) pts.push_back({13.0 * (i % 6), 29.0 * (i / 6) + (i % 6) * (i % 6)});
  std::vector<MatchPair> m;
  for (int i = 0; i < 30; ++i) m.push_back({i, i, 0});
  const HomographyEstimate e = estimate_homography(m, pts, pts);
  EXPECT_LT((e.homography.matrix() - Eigen::Matrix3d::Identity()).norm(), 1e-9);
}

TEST(Ransac, ThirtyPlusTenOutliers) {
  int good = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    const Problem p = make_problem(1000 + s, 30, 10, 0.0);
    RansacOptions opt;
    opt.seed = s;
    const HomographyEstimate e = estimate_homography(p.matches, p.query, p.train, opt);
    good += e.inlier_count >= 28 && mean_reprojection(e.homography, p) <= 0.5;
  }
  EXPECT_GE(good, 0.95 * seeds);
}

TEST(Ransac, InlierMaskAndCounts) {
  for (int s = 0; s < 100; ++s) {
    const Problem p = make_problem(500 + s, 30, 15, 0.8);
    RansacOptions opt;
    opt.seed = s;
    const HomographyEstimate e = estimate_homography(p.matches, p.query, p.train, opt);
    ASSERT_EQ(e.inliers.size(), p.matches.size());
    EXPECT_EQ(std::count(e.inliers.begin(), e.inliers.end(), true), e.inlier_count);
    EXPECT_LE(e.inlier_count, static_cast<int>(p.matches.size()));
    // The returned model is the DLT refit over the reported consensus set.
    std::vector<Point2> f, t;
    for (std::size_t i = 0; i < p.matches.size(); ++i) {
      if (!e.inliers[i]) continue;
      f.push_back(p.query[p.matches[i].query_idx]);
      t.push_back(p.train[p.matches[i].train_idx]);
    }
    const Eigen::Matrix3d refit = fit_homography_dlt(f, t).matrix();
    EXPECT_LT((refit - e.homography.matrix()).norm(), 1e-9 * refit.norm());
    EXPECT_LT(mean_reprojection(e.homography, p), 1.0);
  }
}

TEST(Ransac, CountNeverGrowsAsThresholdShrinks) {
  const double thresholds[] = {10.0, 6.0, 4.0, 3.0, 2.0, 1.5, 1.0};
  for (int s = 0; s < 100; ++s) {
    const Problem p = make_problem(700 + s, 40, 20, 0.7);
    int previous = std::numeric_limits<int>::max();
    for (double t : thresholds) {
      RansacOptions opt;
      opt.seed = s;
      opt.threshold_px = t;
      opt.min_inliers = 4;
      int count = 0;
      try {
        count = estimate_homography(p.matches, p.query, p.train, opt).inlier_count;
      } catch (const Error&) {
        count = 0;
      }
      EXPECT_LE(count, previous) << "seed " << s << " threshold " << t;
      previous = count;
    }
  }
}

TEST(Ransac, DeterministicPerSeed) {
  const Problem p = make_problem(77, 35, 15, 0.5);
  RansacOptions opt;
  opt.seed = 5;
  const auto a = estimate_homography(p.matches, p.query, p.train, opt);
  const auto b = estimate_homography(p.matches, p.query, p.train, opt);
  EXPECT_EQ(a.homography.matrix(), b.homography.matrix());
  EXPECT_EQ(a.inliers, b.inliers);
}

TEST(Ransac, Failures) {
  const Problem p = make_problem(8, 3, 0, 0.0);
  EXPECT_THROW(estimate_homography(p.matches, p.query, p.train), Error);
  // Pure noise cannot reach min_inliers.
  const Problem noise = make_problem(9, 0, 60, 0.0);
  try {
    estimate_homography(noise.matches, noise.query, noise.train);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateConfiguration);
  }
}

}  // namespace
}  // namespace kioskbot
