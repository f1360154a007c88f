#include "kioskbot/geometry.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "kioskbot/error.hpp"

namespace kioskbot {

namespace {

Eigen::Matrix3d normalize(const Eigen::Matrix3d& m) {
  if (m(2, 2) != 0.0) return m / m(2, 2);
  const double n = m.norm();
  return n > 0.0 ? Eigen::Matrix3d(m / n) : m;
}

}  // namespace

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Homography::Homography(const Eigen::Matrix3d& m) : m_(normalize(m)) {
  if (!m_.allFinite() || std::abs(m_.determinant()) <= kProjectiveEpsilon) {
    throw Error(ErrorKind::DegenerateConfiguration, "homography is not invertible");
  }
}

Homography Homography::translation(double tx, double ty) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 2) = tx;
  m(1, 2) = ty;
  return Homography(m);
}

Homography Homography::inverse() const { return Homography(m_.inverse()); }

Homography operator*(const Homography& a, const Homography& b) {
  return Homography(a.m_ * b.m_);
}

Point2 apply_homography(const Homography& h, Point2 p) {
  const auto& m = h.matrix();
  const double w = m(2, 0) * p.x + m(2, 1) * p.y + m(2, 2);
  if (std::abs(w) <= kProjectiveEpsilon) {
    throw Error(ErrorKind::PointAtInfinity, "point maps to infinity");
  }
  return {(m(0, 0) * p.x + m(0, 1) * p.y + m(0, 2)) / w,
          (m(1, 0) * p.x + m(1, 1) * p.y + m(1, 2)) / w};
}

Circle circumcircle(Point2 p1, Point2 p2, Point2 p3) {
  const Point2 b = p2 - p1;
  const Point2 c = p3 - p1;
  const double cross = b.x * c.y - b.y * c.x;
  const double longest_sq = std::max({b.x * b.x + b.y * b.y, c.x * c.x + c.y * c.y,
                                      (c.x - b.x) * (c.x - b.x) + (c.y - b.y) * (c.y - b.y)});
  if (!(std::abs(cross) > 1e-9 * longest_sq)) {
    throw Error(ErrorKind::CollinearPoints, "points do not define a circle");
  }
  const double b2 = b.x * b.x + b.y * b.y;
  const double c2 = c.x * c.x + c.y * c.y;
  const double d = 2.0 * cross;
  const Point2 u{(c.y * b2 - b.y * c2) / d, (b.x * c2 - c.x * b2) / d};
  return {p1 + u, std::hypot(u.x, u.y)};
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

double normalize_degrees(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a < 0.0) a += 360.0;
  // fmod of a tiny negative value can round up to exactly 360.
  return a >= 360.0 ? 0.0 : a;
}

double angle_difference_deg(double a, double b) {
  double d = normalize_degrees(a - b);
  return d > 180.0 ? d - 360.0 : d;
}

double bearing_deg(Point2 from, Point2 to) {
  return normalize_degrees(rad_to_deg(std::atan2(to.y - from.y, to.x - from.x)));
}

Point2 unit_vector(double bearing) {
  const double a = deg_to_rad(bearing);
  return {std::cos(a), std::sin(a)};
}

double circular_mean_deg(std::span<const double> angles_deg) {
  double sx = 0.0, sy = 0.0;
  for (double a : angles_deg) {
    const Point2 u = unit_vector(a);
    sx += u.x;
    sy += u.y;
  }
  if (std::hypot(sx, sy) < 1e-12) {
    throw Error(ErrorKind::DegenerateConfiguration, "circular mean undefined");
  }
  return normalize_degrees(rad_to_deg(std::atan2(sy, sx)));
}

PolarTarget screen_to_polar(const BotPose& pose, Point2 target) {
  const double r = distance(pose.position, target);
  if (r > kMaxReachMm) {
    throw Error(ErrorKind::OutOfReach, "target is " + std::to_string(r) + " mm from the pole axis");
  }
  const double theta = r > 0.0 ? bearing_deg(pose.position, target) - pose.orientation_deg : 0.0;
  return {normalize_degrees(theta), r};
}

Point2 polar_to_screen(const PolarTarget& target, const BotPose& pose) {
  return pose.position + target.r_mm * unit_vector(target.theta_deg + pose.orientation_deg);
}

}  // namespace kioskbot
