#pragma once

// Planar and projective primitives shared by the whole pipeline.
//
// Screen frame: origin at the screen's top-left corner, x to the right,
// y downward, millimeters. Image frames use the same orientation in pixels.
// Angles are degrees everywhere; bearings are measured from +x towards +y.

#include <Eigen/Core>
#include <span>

namespace kioskbot {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2, Point2) = default;
};

double distance(Point2 a, Point2 b);

/// Smallest |w| accepted when dehomogenizing; also the determinant floor
/// for an invertible (normalized) homography.
inline constexpr double kProjectiveEpsilon = 1e-12;

/// 3x3 projective map defined up to scale. Stored normalized so that
/// m(2,2) == 1 whenever m(2,2) != 0 (otherwise by Frobenius norm).
class Homography {
 public:
  Homography() : m_(Eigen::Matrix3d::Identity()) {}
  /// Throws DegenerateConfiguration when the matrix is not invertible.
  explicit Homography(const Eigen::Matrix3d& m);

  static Homography identity() { return Homography(); }
  static Homography translation(double tx, double ty);

  const Eigen::Matrix3d& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  Homography inverse() const;
  /// (a * b) applies b first, then a.
  friend Homography operator*(const Homography& a, const Homography& b);

 private:
  Eigen::Matrix3d m_;
};

/// Throws PointAtInfinity when the projected w is within kProjectiveEpsilon of zero.
Point2 apply_homography(const Homography& h, Point2 p);

struct Circle {
  Point2 center;
  double radius = 0.0;
};

/// Circle through three points. Throws CollinearPoints when twice the
/// triangle area is at most 1e-9 times the squared longest side.
Circle circumcircle(Point2 p1, Point2 p2, Point2 p3);

/// Pole-axis position on the screen plus the bearing of the base's zero angle.
struct BotPose {
  Point2 position;
  double orientation_deg = 0.0;
};

/// Bot-frame polar coordinates: bearing relative to the base and reel length.
struct PolarTarget {
  double theta_deg = 0.0;
  double r_mm = 0.0;
};

inline constexpr double kMaxReachMm = 700.0;

/// Throws OutOfReach when the target is farther than kMaxReachMm.
PolarTarget screen_to_polar(const BotPose& pose, Point2 target);
Point2 polar_to_screen(const PolarTarget& target, const BotPose& pose);

double deg_to_rad(double deg);
double rad_to_deg(double rad);
/// Maps any finite angle into [0, 360).
double normalize_degrees(double deg);
/// Signed difference a - b wrapped into (-180, 180].
double angle_difference_deg(double a, double b);
double bearing_deg(Point2 from, Point2 to);
Point2 unit_vector(double bearing);
/// Mean direction of a set of angles; throws DegenerateConfiguration when the
/// resultant vector vanishes.
double circular_mean_deg(std::span<const double> angles_deg);

}  // namespace kioskbot
