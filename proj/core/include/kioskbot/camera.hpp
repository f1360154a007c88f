#pragma once

// Simulated pole camera: a pinhole 70 mm above the screen, tilted 45 degrees
// down, mounted axis_offset_mm out from the rotation axis and looking
// outward along the pole bearing.

#include <array>
#include <cstdint>
#include <vector>

#include "kioskbot/geometry.hpp"
#include "kioskbot/image.hpp"

namespace kioskbot {

class Kiosk;
class BotSim;

struct CameraModel {
  double height_mm = 70.0;
  double tilt_deg = 45.0;
  double axis_offset_mm = 15.0;
  int image_width = 640;
  int image_height = 480;
  double vertical_fov_deg = 45.0;

  double focal_px() const;
  /// Principal point; also the "photo center" used for localization.
  Point2 image_center() const { return {0.5 * (image_width - 1), 0.5 * (image_height - 1)}; }
  /// Distance from the pole axis to where the optical axis meets the screen.
  double axis_ground_radius_mm() const;
};

/// Degradations of a real pole camera. pointing_jitter_deg is the standard
/// deviation of an unknown per-shot rotation of the camera about its optical
/// center (tilt and pan drawn independently), standing in for mount play and
/// pole wobble. The rest are image-space effects applied after the geometric
/// render; blur_radius_px is the Gaussian sigma.
struct PerturbationModel {
  double pixel_noise_sigma = 0.0;
  double gamma = 1.0;
  double blur_radius_px = 0.0;
  std::uint64_t seed = 0;
  double pointing_jitter_deg = 0.0;

  static PerturbationModel none() { return {}; }
  /// The degradation level the evaluation harness uses by default.
  static PerturbationModel standard(std::uint64_t seed = 0);
};

struct CameraShot {
  GrayImage image;
  double internal_angle_deg = 0.0;
  CameraModel model;
};

/// (lateral, forward) millimeters on the screen plane in the camera's own
/// ground frame -> photo pixels. Lateral is positive to the camera's right,
/// forward is measured from the point below the optical center.
Homography local_ground_to_photo(const CameraModel& model);

/// Exact screen-mm -> photo-pixel map for a shot at base-frame pole angle
/// `internal_angle_deg` from `pose`.
Homography ground_truth_homography(const BotPose& pose, double internal_angle_deg, const CameraModel& model);

/// Inverse-warps the screen raster into a photo (bilinear, off-screen is
/// black), then applies gamma, blur and additive noise, in that order.
CameraShot render_shot(const GrayImage& screen_image, double mm_per_px, const BotPose& pose,
                       double internal_angle_deg, const CameraModel& model, const PerturbationModel& perturb);

/// Three shots at the current pole angle a, a+30 and a+60 of the kiosk's
/// current screen; leaves the pole at a+60 and advances the bot clock by the
/// capture time.
std::array<CameraShot, 3> capture_sequence(const Kiosk& kiosk, BotSim& bot, const CameraModel& model,
                                           const PerturbationModel& perturb);

inline constexpr double kCaptureStepDeg = 30.0;

/// Top-down resampling of a photo onto the screen plane at a chosen scale
/// using only the fixed camera geometry (no pose). Row 0 is the far edge.
struct RectifiedView {
  GrayImage image;
  /// Nonzero where the photo covered the pixel.
  std::vector<std::uint8_t> valid;
  /// Rectified pixel -> photo pixel.
  Homography to_photo;
};

RectifiedView rectify_photo(const GrayImage& photo, const CameraModel& model, double mm_per_px);

}  // namespace kioskbot
