#pragma once

// The touch-actuation bot: a rotating pole with an extendable reel whose
// length is read from 2.5 mm reflective stripes. Motion is rate limited and
// the probe only fires once it has arrived.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kioskbot/geometry.hpp"
#include "kioskbot/interface.hpp"

namespace kioskbot {

struct BotGeometry {
  double base_radius_mm = 45.0;
  double reach_mm = kMaxReachMm;
  double stripe_pitch_mm = 2.5;
  double extension_speed_mm_s = 25.0;
  double rotation_speed_deg_s = 30.0;  // 5 rpm
  double capture_time_s = 4.0;
  double touch_dwell_s = 0.5;
};

/// Terminal actuation error. Rotation error is zero-mean Gaussian on every
/// commanded rotation; extension error is Gaussian noise followed by stripe
/// quantization.
struct ErrorModel {
  double rotation_sigma_deg = 0.83;
  double extension_noise_sigma_mm = 3.9;
  bool quantize = true;
  std::uint64_t seed = 0;

  static ErrorModel noiseless(bool quantize = true) { return {0.0, 0.0, quantize, 0}; }
};

struct MotionPlan {
  PolarTarget target;
  double predicted_duration_s = 0.0;
  Point2 contact_point_nominal;
};

/// Rotation at the pole speed, reel out and fully back at the reel speed,
/// plus the touch dwell.
double motion_duration_s(double delta_theta_deg, double r_mm, const BotGeometry& geometry = {});

/// Plans a touch at `target` given the (estimated) pose and the current pole
/// angle. Throws OutOfReach.
MotionPlan plan_motion(const BotPose& pose, double current_pole_deg, Point2 target,
                       const BotGeometry& geometry = {});

/// True iff the element's box intersects the closed base disk.
bool check_occlusion(const BotPose& pose, const Element& element, const BotGeometry& geometry = {});

struct TouchReport {
  PolarTarget commanded;
  PolarTarget realized;
  Point2 contact;
  TouchOutcome outcome;
  double duration_s = 0.0;
  double start_s = 0.0;
  double end_s = 0.0;
  /// Clickable elements the reel passed over on its way out and back.
  std::vector<std::string> swept_elements;
};

class BotSim {
 public:
  explicit BotSim(ErrorModel errors = {}, BotGeometry geometry = {});

  const BotGeometry& geometry() const { return geometry_; }
  const ErrorModel& error_model() const { return errors_; }

  /// Attaches the bot with its pole axis at `point`; zeroes the encoder.
  /// Throws TooCloseToEdge unless the base disk fits on the screen.
  BotPose place(const InterfaceRecord& screen, Point2 point, double orientation_deg);
  bool placed() const { return placed_; }
  const BotPose& true_pose() const { return pose_; }

  /// Encoder reading (commanded pole angle) in the base frame.
  double pole_angle_deg() const { return pole_deg_; }
  double clock_s() const { return clock_; }
  void advance_clock(double seconds) { clock_ += seconds; }

  /// Rotates to an absolute base-frame angle; returns the realized angle.
  /// The clock advances by the travel time. A zero-length move is exact.
  double rotate_to(double theta_deg);
  /// Extends the reel to `r_mm`; returns the realized (stripe-read) length.
  double extend_to(double r_mm);

  /// Executes the plan against the bot's true pose and fires exactly one
  /// kiosk touch at the realized contact. Throws OutOfReach or Occluded.
  TouchReport execute_touch(const MotionPlan& plan, Kiosk& kiosk);

 private:
  double sample_normal(double sigma);

  ErrorModel errors_;
  BotGeometry geometry_;
  std::mt19937_64 rng_;
  bool placed_ = false;
  BotPose pose_;
  double pole_deg_ = 0.0;
  double reel_mm_ = 0.0;
  double clock_ = 0.0;
};

/// True iff the log holds exactly one event inside the motion's time window.
bool sweep_safety_check(const TouchReport& report, std::span<const TouchEvent> touch_log);

}  // namespace kioskbot
