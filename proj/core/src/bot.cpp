#include "kioskbot/bot.hpp"

#include <algorithm>
#include <cmath>

#include "kioskbot/error.hpp"

namespace kioskbot {

namespace {

// Whether the segment a-b passes through the closed box (Liang-Barsky clip).
bool segment_hits_box(Point2 a, Point2 b, const BBox& box) {
  double t0 = 0.0, t1 = 1.0;
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - box.x, box.x + box.w - a.x, a.y - box.y, box.y + box.h - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
    } else {
      const double t = q[i] / p[i];
      if (p[i] < 0.0) t0 = std::max(t0, t);
      else t1 = std::min(t1, t);
      if (t0 > t1) return false;
    }
  }
  return true;
}

}  // namespace

double motion_duration_s(double delta_theta_deg, double r_mm, const BotGeometry& geometry) {
  return std::abs(delta_theta_deg) / geometry.rotation_speed_deg_s +
         2.0 * r_mm / geometry.extension_speed_mm_s + geometry.touch_dwell_s;
}

MotionPlan plan_motion(const BotPose& pose, double current_pole_deg, Point2 target, const BotGeometry& geometry) {
  const PolarTarget polar = screen_to_polar(pose, target);
  if (polar.r_mm > geometry.reach_mm) {
    throw Error(ErrorKind::OutOfReach, "target exceeds the reel reach of " + std::to_string(geometry.reach_mm) + " mm");
  }
  const double delta = angle_difference_deg(polar.theta_deg, current_pole_deg);
  return {polar, motion_duration_s(delta, polar.r_mm, geometry), target};
}

bool check_occlusion(const BotPose& pose, const Element& element, const BotGeometry& geometry) {
  return distance(element.bbox_mm.clamp(pose.position), pose.position) <= geometry.base_radius_mm;
}

BotSim::BotSim(ErrorModel errors, BotGeometry geometry)
    : errors_(errors), geometry_(geometry), rng_(errors.seed) {}

double BotSim::sample_normal(double sigma) {
  if (sigma <= 0.0) return 0.0;
  std::normal_distribution<double> n(0.0, sigma);
  return n(rng_);
}

BotPose BotSim::place(const InterfaceRecord& screen, Point2 point, double orientation_deg) {
  const double m = geometry_.base_radius_mm;
  if (point.x < m || point.y < m || point.x > screen.screen_width_mm - m || point.y > screen.screen_height_mm - m) {
    throw Error(ErrorKind::TooCloseToEdge, "base disk of radius " + std::to_string(m) + " mm leaves the screen at (" +
                                               std::to_string(point.x) + ", " + std::to_string(point.y) + ")");
  }
  pose_ = {point, normalize_degrees(orientation_deg)};
  placed_ = true;
  pole_deg_ = 0.0;
  reel_mm_ = 0.0;
  return pose_;
}

double BotSim::rotate_to(double theta_deg) {
  const double target = normalize_degrees(theta_deg);
  const double delta = angle_difference_deg(target, pole_deg_);
  clock_ += std::abs(delta) / geometry_.rotation_speed_deg_s;
  pole_deg_ = target;
  if (delta == 0.0) return target;
  return target + sample_normal(errors_.rotation_sigma_deg);
}

double BotSim::extend_to(double r_mm) {
  const double commanded = std::clamp(r_mm, 0.0, geometry_.reach_mm);
  clock_ += std::abs(commanded - reel_mm_) / geometry_.extension_speed_mm_s;
  reel_mm_ = commanded;
  double realized = commanded + sample_normal(errors_.extension_noise_sigma_mm);
  if (errors_.quantize) {
    realized = geometry_.stripe_pitch_mm * std::round(realized / geometry_.stripe_pitch_mm);
  }
  return std::clamp(realized, 0.0, geometry_.reach_mm);
}

TouchReport BotSim::execute_touch(const MotionPlan& plan, Kiosk& kiosk) {
  if (!placed_) throw Error(ErrorKind::Protocol, "bot has not been placed");
  if (plan.target.r_mm > geometry_.reach_mm) {
    throw Error(ErrorKind::OutOfReach, "commanded reel length " + std::to_string(plan.target.r_mm) + " mm");
  }
  if (plan.target.r_mm <= geometry_.base_radius_mm) {
    throw Error(ErrorKind::Occluded, "target lies under the bot base");
  }
  TouchReport report;
  report.commanded = plan.target;
  report.start_s = clock_;

  const double theta = rotate_to(plan.target.theta_deg);
  const double r = extend_to(plan.target.r_mm);
  report.realized = {normalize_degrees(theta), r};
  report.contact = polar_to_screen(report.realized, pose_);

  // The probe is electrically gated: crossing buttons on the way out and back
  // never registers, only the single pulse at the end of travel.
  const Point2 reel_root = pose_.position + geometry_.base_radius_mm * unit_vector(theta + pose_.orientation_deg);
  for (const auto& e : kiosk.current_screen().elements) {
    if (e.clickable && !e.bbox_mm.contains(report.contact) && segment_hits_box(reel_root, report.contact, e.bbox_mm)) {
      report.swept_elements.push_back(e.element_id);
    }
  }
  if (!kiosk.interface().on_screen(report.contact)) {
    extend_to(0.0);
    throw Error(ErrorKind::OutOfReach, "probe contact falls off the screen");
  }
  clock_ += geometry_.touch_dwell_s;
  report.outcome = kiosk.touch(report.contact, clock_);
  extend_to(0.0);

  report.end_s = clock_;
  report.duration_s = report.end_s - report.start_s;
  return report;
}

bool sweep_safety_check(const TouchReport& report, std::span<const TouchEvent> touch_log) {
  const auto n = std::count_if(touch_log.begin(), touch_log.end(), [&](const TouchEvent& e) {
    return e.timestamp_s > report.start_s && e.timestamp_s <= report.end_s;
  });
  return n == 1;
}

}  // namespace kioskbot
