#include "kioskbot/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Geometry>

#include "kioskbot/bot.hpp"
#include "kioskbot/error.hpp"
#include "kioskbot/interface.hpp"

namespace kioskbot {

double CameraModel::focal_px() const {
  return 0.5 * image_height / std::tan(deg_to_rad(0.5 * vertical_fov_deg));
}

double CameraModel::axis_ground_radius_mm() const {
  return axis_offset_mm + height_mm / std::tan(deg_to_rad(tilt_deg));
}

PerturbationModel PerturbationModel::standard(std::uint64_t seed) {
  return {12.0, 1.3, 1.5, seed, 0.25};
}

Homography local_ground_to_photo(const CameraModel& model) {
  const double t = deg_to_rad(model.tilt_deg);
  const double f = model.focal_px();
  const Point2 c = model.image_center();
  Eigen::Matrix3d k;
  k << f, 0, c.x, 0, f, c.y, 0, 0, 1;
  // Camera coordinates of ground point (lat, fwd): x = lat,
  // y = h cos t - fwd sin t, z = h sin t + fwd cos t.
  Eigen::Matrix3d ground;
  ground << 1, 0, 0, 0, -std::sin(t), model.height_mm * std::cos(t), 0, std::cos(t), model.height_mm * std::sin(t);
  return Homography(k * ground);
}

Homography ground_truth_homography(const BotPose& pose, double internal_angle_deg, const CameraModel& model) {
  const double bearing = pose.orientation_deg + internal_angle_deg;
  const Point2 u = unit_vector(bearing);
  const Point2 r{-u.y, u.x};
  const Point2 origin = pose.position + model.axis_offset_mm * u;
  Eigen::Matrix3d to_local;
  to_local << r.x, r.y, -(r.x * origin.x + r.y * origin.y), u.x, u.y, -(u.x * origin.x + u.y * origin.y), 0, 0, 1;
  return local_ground_to_photo(model) * Homography(to_local);
}

CameraShot render_shot(const GrayImage& screen_image, double mm_per_px, const BotPose& pose,
                       double internal_angle_deg, const CameraModel& model, const PerturbationModel& perturb) {
  if (perturb.gamma < 0.5 || perturb.gamma > 2.0 || perturb.pixel_noise_sigma < 0.0 || perturb.blur_radius_px < 0.0 ||
      perturb.pointing_jitter_deg < 0.0) {
    throw Error(ErrorKind::DegenerateConfiguration, "perturbation parameters out of range");
  }
  Homography screen_to_photo = ground_truth_homography(pose, internal_angle_deg, model);
  if (perturb.pointing_jitter_deg > 0.0) {
    std::mt19937_64 rng(perturb.seed ^ 0x6A09E667F3BCC909ull);
    std::normal_distribution<double> jitter(0.0, deg_to_rad(perturb.pointing_jitter_deg));
    const double dtilt = jitter(rng), dpan = jitter(rng);
    Eigen::Matrix3d rot = (Eigen::AngleAxisd(dpan, Eigen::Vector3d::UnitY()) *
                           Eigen::AngleAxisd(dtilt, Eigen::Vector3d::UnitX())).toRotationMatrix();
    const double f = model.focal_px();
    const Point2 c = model.image_center();
    Eigen::Matrix3d k;
    k << f, 0, c.x, 0, f, c.y, 0, 0, 1;
    screen_to_photo = Homography(k * rot * k.inverse()) * screen_to_photo;
  }
  const Eigen::Matrix3d photo_to_screen = screen_to_photo.inverse().matrix();
  const int w = model.image_width, h = model.image_height;
  const double inv = 1.0 / mm_per_px;
  FloatImage img{w, h, std::vector<float>(static_cast<std::size_t>(w) * h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double wz = photo_to_screen(2, 0) * x + photo_to_screen(2, 1) * y + photo_to_screen(2, 2);
      double v = 0.0;
      if (wz > kProjectiveEpsilon) {
        const double mx = (photo_to_screen(0, 0) * x + photo_to_screen(0, 1) * y + photo_to_screen(0, 2)) / wz;
        const double my = (photo_to_screen(1, 0) * x + photo_to_screen(1, 1) * y + photo_to_screen(1, 2)) / wz;
        v = screen_image.sample(mx * inv - 0.5, my * inv - 0.5, 0.0);
      }
      img.data[static_cast<std::size_t>(y) * w + x] = static_cast<float>(v);
    }
  }
  if (perturb.gamma != 1.0) {
    for (auto& v : img.data) v = static_cast<float>(255.0 * std::pow(std::max(0.0f, v) / 255.0, perturb.gamma));
  }
  if (perturb.blur_radius_px > 0.0) img = gaussian_blur(img, perturb.blur_radius_px);
  if (perturb.pixel_noise_sigma > 0.0) {
    std::mt19937_64 rng(perturb.seed);
    std::normal_distribution<double> noise(0.0, perturb.pixel_noise_sigma);
    for (auto& v : img.data) v = static_cast<float>(v + noise(rng));
  }
  return {to_gray(img), normalize_degrees(internal_angle_deg), model};
}

std::array<CameraShot, 3> capture_sequence(const Kiosk& kiosk, BotSim& bot, const CameraModel& model,
                                           const PerturbationModel& perturb) {
  const ScreenRaster raster = current_screen_image(kiosk);
  const double a = bot.pole_angle_deg();
  std::array<CameraShot, 3> shots;
  for (int i = 0; i < 3; ++i) {
    PerturbationModel p = perturb;
    // Distinct, reproducible noise per shot.
    p.seed = perturb.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(i) + 1;
    shots[i] = render_shot(raster.image, raster.mm_per_pixel, bot.true_pose(), a + kCaptureStepDeg * i, model, p);
  }
  // The pole steps through the three stops; capture time covers the moves.
  bot.rotate_to(a + 2 * kCaptureStepDeg);
  const double elapsed = 2 * kCaptureStepDeg / bot.geometry().rotation_speed_deg_s;
  bot.advance_clock(bot.geometry().capture_time_s - elapsed);
  return shots;
}

RectifiedView rectify_photo(const GrayImage& photo, const CameraModel& model, double mm_per_px) {
  const Homography ground_to_photo = local_ground_to_photo(model);
  const Homography photo_to_ground = ground_to_photo.inverse();
  double lat_min = std::numeric_limits<double>::max(), lat_max = -lat_min;
  double fwd_min = lat_min, fwd_max = -lat_min;
  const double w = model.image_width, h = model.image_height;
  for (Point2 corner : {Point2{-0.5, -0.5}, Point2{w - 0.5, -0.5}, Point2{-0.5, h - 0.5}, Point2{w - 0.5, h - 0.5}}) {
    const Point2 g = apply_homography(photo_to_ground, corner);
    lat_min = std::min(lat_min, g.x);
    lat_max = std::max(lat_max, g.x);
    fwd_min = std::min(fwd_min, g.y);
    fwd_max = std::max(fwd_max, g.y);
  }
  const int rw = std::max(GrayImage::kMinSide, static_cast<int>(std::ceil((lat_max - lat_min) / mm_per_px)));
  const int rh = std::max(GrayImage::kMinSide, static_cast<int>(std::ceil((fwd_max - fwd_min) / mm_per_px)));
  // Rectified pixel (i, j) sits at lateral lat_min + (i + 0.5) s and forward
  // fwd_max - (j + 0.5) s: a rotation of the screen frame, never a mirror.
  Eigen::Matrix3d rect_to_ground;
  rect_to_ground << mm_per_px, 0, lat_min + 0.5 * mm_per_px, 0, -mm_per_px, fwd_max - 0.5 * mm_per_px, 0, 0, 1;
  const Homography to_photo = ground_to_photo * Homography(rect_to_ground);
  const Eigen::Matrix3d& m = to_photo.matrix();

  RectifiedView view{GrayImage(rw, rh, 0), std::vector<std::uint8_t>(static_cast<std::size_t>(rw) * rh, 0), to_photo};
  for (int j = 0; j < rh; ++j) {
    for (int i = 0; i < rw; ++i) {
      const double wz = m(2, 0) * i + m(2, 1) * j + m(2, 2);
      if (wz <= kProjectiveEpsilon) continue;
      const double px = (m(0, 0) * i + m(0, 1) * j + m(0, 2)) / wz;
      const double py = (m(1, 0) * i + m(1, 1) * j + m(1, 2)) / wz;
      const double v = photo.sample(px, py, -1.0);
      if (v < 0.0) continue;
      view.image.at(i, j) = static_cast<std::uint8_t>(std::floor(v + 0.5));
      view.valid[static_cast<std::size_t>(j) * rw + i] = 1;
    }
  }
  return view;
}

}  // namespace kioskbot
