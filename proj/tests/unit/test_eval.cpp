#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "kioskbot/error.hpp"
#include "kioskbot/eval.hpp"
#include "kioskbot/fixtures.hpp"
#include "test_support.hpp"

namespace kioskbot {
namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

int columns(const std::string& line) { return 1 + static_cast<int>(std::count(line.begin(), line.end(), ',')); }

template <typename Table>
std::string csv(const Table& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

TEST(EvalConfig, Validation) {
  EXPECT_NO_THROW(validate(EvalConfig{}));
  EvalConfig far;
  far.extension_lengths_mm.push_back(703);
  EXPECT_THROW(validate(far), Error);
  EvalConfig negative;
  negative.extension_lengths_mm = {-1};
  EXPECT_THROW(validate(negative), Error);
  EvalConfig no_trials;
  no_trials.trials = 0;
  EXPECT_THROW(validate(no_trials), Error);
  EvalConfig tight;
  tight.corner_inset_mm = 10;
  EXPECT_THROW(validate(tight), Error);
  EXPECT_THROW(eval_extension(far), Error);
}

TEST(EvalConfig, TrialSeeds) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 5; ++a)
    for (std::uint64_t b = 0; b < 5; ++b)
      for (std::uint64_t c = 0; c < 3; ++c) seen.insert(trial_seed(7, a, b, c));
  EXPECT_EQ(seen.size(), 75u);
  EXPECT_EQ(trial_seed(7, 1, 2, 3), trial_seed(7, 1, 2, 3));
  EXPECT_NE(trial_seed(7, 1, 2, 3), trial_seed(8, 1, 2, 3));
}

TEST(Placements, CanonicalPointsAndFacing) {
  const InterfaceRecord rec = fixtures::build(fixtures::kAirport);
  const double inset = EvalConfig{}.corner_inset_mm;
  EXPECT_DOUBLE_EQ(inset, 50.0);
  const auto pts = canonical_points(rec, inset);
  ASSERT_EQ(pts.size(), 5u);
  const double w = rec.screen_width_mm, h = rec.screen_height_mm;
  EXPECT_EQ(pts[0], (Point2{inset, inset}));
  EXPECT_EQ(pts[1], (Point2{w - inset, inset}));
  EXPECT_EQ(pts[2], (Point2{inset, h - inset}));
  EXPECT_EQ(pts[3], (Point2{w - inset, h - inset}));
  EXPECT_EQ(pts[4], (Point2{w / 2, h / 2}));

  // the middle shot looks along the ray towards the screen center
  Kiosk kiosk(std::make_shared<const InterfaceRecord>(rec));
  for (int i = 0; i < 4; ++i) {
    BotSim bot(ErrorModel::noiseless());
    const BotPose pose = bot.place(rec, pts[i], facing_orientation_deg(rec, pts[i]));
    const auto shots = capture_sequence(kiosk, bot, {}, PerturbationModel::none());
    const Point2 c = apply_homography(ground_truth_homography(pose, shots[1].internal_angle_deg, {}).inverse(),
                                      CameraModel{}.image_center());
    const Point2 to_center = pts[4] - pts[i];
    const Point2 to_shot = c - pts[i];
    EXPECT_NEAR(to_center.x * to_shot.y - to_center.y * to_shot.x, 0.0,
                1e-6 * distance(pts[4], pts[i]) * distance(c, pts[i]));
    EXPECT_GT(to_center.x * to_shot.x + to_center.y * to_shot.y, 0.0);
  }
}

TEST(Rotation, NoiseFreeIsExactlyZero) {
  EvalConfig cfg;
  cfg.errors = ErrorModel::noiseless();
  const RotationTable t = eval_rotation(cfg);
  ASSERT_EQ(t.rows.size(), 2u * 7u * 3u);
  for (const auto& r : t.rows) EXPECT_EQ(r.error_deg, 0.0);
  EXPECT_EQ(t.grand_mean_abs_deg, 0.0);
}

TEST(Rotation, DefaultModelAndIndependentDirections) {
  EvalConfig cfg;
  cfg.seed = 11;
  const RotationTable t = eval_rotation(cfg);
  EXPECT_GE(t.grand_mean_abs_deg, 0.2);
  EXPECT_LE(t.grand_mean_abs_deg, 1.1);
  // oracle: recompute from the rows
  double sum = 0.0;
  for (const auto& r : t.rows) {
    EXPECT_NEAR(r.error_deg, angle_difference_deg(r.realized_deg, r.commanded_deg), 1e-9);
    sum += std::abs(r.error_deg);
  }
  EXPECT_NEAR(sum / t.rows.size(), t.grand_mean_abs_deg, 1e-9);
  // the 180 deg endpoint appears in both sweeps with different draws
  std::vector<double> cw, ccw;
  for (const auto& r : t.rows) {
    if (r.commanded_deg != 180.0 || r.trial != 0) continue;
    (r.direction == "clockwise" ? cw : ccw).push_back(r.error_deg);
  }
  ASSERT_EQ(cw.size(), 1u);
  ASSERT_EQ(ccw.size(), 1u);
  EXPECT_NE(cw[0], ccw[0]);
  EXPECT_EQ(csv(t), csv(eval_rotation(cfg)));
  cfg.seed = 12;
  EXPECT_NE(csv(t), csv(eval_rotation(cfg)));
}

TEST(Extension, NoiseFreeQuantizedWithinHalfPitch) {
  EvalConfig cfg;
  cfg.errors = ErrorModel::noiseless(true);
  const ExtensionTable t = eval_extension(cfg);
  ASSERT_EQ(t.rows.size(), 15u * 2u * 3u);
  for (const auto& r : t.rows) EXPECT_LE(r.abs_error_mm, 1.25 + 1e-9) << r.commanded_mm;
  EXPECT_LE(t.max_error_mm, 1.25 + 1e-9);
}

TEST(Extension, OffPitchLengthsStayWithinHalfPitch) {
  // the standard sweep is all multiples of the pitch, so probe between stripes
  EvalConfig cfg;
  cfg.errors = ErrorModel::noiseless(true);
  cfg.extension_lengths_mm.clear();
  for (double r = 0.3; r < 700.0; r += 7.3) cfg.extension_lengths_mm.push_back(r);
  const ExtensionTable t = eval_extension(cfg);
  EXPECT_LE(t.max_error_mm, 1.25 + 1e-9);
  EXPECT_GT(t.max_error_mm, 1.0);
  for (const auto& r : t.rows) {
    const double nearest = 2.5 * std::round(r.commanded_mm / 2.5);
    EXPECT_NEAR(r.realized_mm, nearest, 1e-9) << r.commanded_mm;
  }
}

TEST(Extension, DefaultModel) {
  EvalConfig cfg;
  cfg.seed = 3;
  const ExtensionTable t = eval_extension(cfg);
  EXPECT_GE(t.grand_mean_mm, 1.5);
  EXPECT_LE(t.grand_mean_mm, 4.5);
  double sum = 0.0, mx = 0.0;
  for (const auto& r : t.rows) {
    EXPECT_NEAR(r.abs_error_mm, std::abs(r.realized_mm - r.commanded_mm), 1e-9);
    sum += r.abs_error_mm;
    mx = std::max(mx, r.abs_error_mm);
  }
  EXPECT_NEAR(sum / t.rows.size(), t.grand_mean_mm, 1e-9);
  EXPECT_DOUBLE_EQ(mx, t.max_error_mm);
}

TEST(Localization, SmallTableIsCorrectAndReproducible) {
  const auto store = test::fixture_store();
  EvalConfig cfg;
  cfg.fixtures = {fixtures::kLocker, fixtures::kMonochrome};
  cfg.trials = 1;
  cfg.perturbation = PerturbationModel::none();
  const LocalizationTable t = eval_localization(*store, cfg);
  ASSERT_EQ(t.rows.size(), 10u);
  ASSERT_EQ(t.fixtures.size(), 2u);
  for (const auto& r : t.rows) {
    if (r.fixture == fixtures::kLocker) {
      EXPECT_TRUE(r.ok()) << r.status;
      EXPECT_NEAR(r.error_mm, distance(r.estimate.position, r.truth.position), 1e-9);
      EXPECT_LE(r.error_mm, 2.0);
      EXPECT_LE(r.orientation_error_deg, 2.0);
    } else {
      EXPECT_EQ(r.status, "InsufficientFeatures");
    }
  }
  EXPECT_EQ(t.fixtures[1].insufficient_features, 5);
  EXPECT_EQ(t.fixtures[0].failures, 0);

  const std::string text = csv(t);
  const auto ls = lines(text);
  ASSERT_EQ(ls.size(), 11u);
  EXPECT_EQ(ls[0].rfind("fixture,point,trial,true_x_mm,true_y_mm,true_orientation_deg,status,identified,", 0), 0u);
  for (const auto& l : ls) EXPECT_EQ(columns(l), columns(ls[0])) << l;
  EXPECT_NE(ls.back().find("NA"), std::string::npos);
  EXPECT_EQ(text, csv(eval_localization(*store, cfg)));
}

TEST(Csv, FixedHeaders) {
  EvalConfig cfg;
  cfg.extension_lengths_mm = {0, 50};
  cfg.rotation_angles_deg = {0, 90};
  cfg.trials = 1;
  EXPECT_EQ(lines(csv(eval_rotation(cfg)))[0], "trial,direction,commanded_deg,realized_deg,error_deg");
  EXPECT_EQ(lines(csv(eval_extension(cfg)))[0], "trial,direction,commanded_mm,realized_mm,abs_error_mm");
  EXPECT_EQ(lines(csv(eval_extension(cfg))).size(), 1u + 4u);
}

TEST(Scenario, OverRealSockets) {
  const auto store = test::fixture_store();
  const ScenarioReport rep = run_scenario(store, load_scenario(test::scenario_dir() + "/bubble_tea_corner.json"));
  EXPECT_TRUE(rep.success) << rep.failure;
  EXPECT_EQ(rep.hits, 4);
  EXPECT_EQ(rep.touches.size(), 4u);
  EXPECT_TRUE(rep.contacts_inside_targets);
  std::ostringstream transcript;
  write_transcript(transcript, rep);
  const auto ls = lines(transcript.str());
  ASSERT_FALSE(ls.empty());
  for (const auto& l : ls) {
    const Json j = Json::parse(l);
    for (const char* key : {"t", "session_id", "role", "dir", "type", "message"}) EXPECT_TRUE(j.contains(key)) << l;
  }
  const auto rows = lines(csv(rep));
  EXPECT_EQ(rows.size(), 1u + rep.touches.size());
}

}  // namespace
}  // namespace kioskbot
