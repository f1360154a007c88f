#include "kioskbot/localization.hpp"

#include <algorithm>
#include <cmath>

#include "kioskbot/error.hpp"
#include "kioskbot/matching.hpp"

namespace kioskbot {

const ReferenceScreen& StoredInterface::screen(std::string_view id) const {
  auto it = std::find_if(screens.begin(), screens.end(), [&](const ReferenceScreen& s) { return s.screen_id == id; });
  if (it == screens.end()) {
    throw Error(ErrorKind::SchemaError, "interface " + record->interface_id + " has no screen " + std::string(id));
  }
  return *it;
}

FeatureSet reference_features(const GrayImage& screen_image, const VisionConfig& config) {
  DetectorOptions options;
  options.fast_threshold = config.fast_threshold;
  options.max_keypoints = std::max(1, static_cast<int>(screen_image.pixels().size()) /
                                          std::max(1, config.reference_pixels_per_keypoint));
  options.grid_cell_px = config.reference_grid_cell_px;
  const int pad = std::max(0, config.reference_border_px);
  if (pad == 0) return detect_and_describe(screen_image, options);
  // off-screen areas photograph as black, so match against a black bezel
  GrayImage framed(screen_image.width() + 2 * pad, screen_image.height() + 2 * pad, 0);
  for (int y = 0; y < screen_image.height(); ++y) {
    std::copy_n(screen_image.row(y), screen_image.width(), &framed.at(pad, y + pad));
  }
  FeatureSet out = detect_and_describe(framed, options);
  for (auto& k : out.keypoints) {
    k.position.x -= pad;
    k.position.y -= pad;
  }
  return out;
}

InterfaceStore::InterfaceStore(std::vector<InterfaceRecord> records, const VisionConfig& config) : config_(config) {
  for (auto& rec : records) {
    StoredInterface stored;
    stored.record = std::make_shared<const InterfaceRecord>(std::move(rec));
    for (const auto& screen : stored.record->screens) {
      ReferenceScreen ref{screen.screen_id, reference_features(screen.image, config_), {}};
      for (const auto& k : ref.features.keypoints) ref.positions.push_back(k.position);
      stored.screens.push_back(std::move(ref));
    }
    interfaces_.push_back(std::move(stored));
  }
}

InterfaceStore InterfaceStore::load(const std::filesystem::path& dir, const VisionConfig& config) {
  return InterfaceStore(load_database(dir), config);
}

const StoredInterface* InterfaceStore::find(std::string_view interface_id) const {
  auto it = std::find_if(interfaces_.begin(), interfaces_.end(),
                         [&](const StoredInterface& s) { return s.record->interface_id == interface_id; });
  return it == interfaces_.end() ? nullptr : &*it;
}

const StoredInterface& InterfaceStore::get(std::string_view interface_id) const {
  if (const auto* s = find(interface_id)) return *s;
  throw Error(ErrorKind::SchemaError, "unknown interface " + std::string(interface_id));
}

PhotoFeatures photo_features(const CameraShot& shot, double reference_mm_per_px, const VisionConfig& config) {
  const RectifiedView view = rectify_photo(shot.image, shot.model, reference_mm_per_px);
  DetectorOptions options;
  options.fast_threshold = config.fast_threshold;
  options.max_keypoints = config.photo_max_keypoints;
  PhotoFeatures out{detect_and_describe(view.image, options, view.valid), {}};
  out.positions.reserve(out.features.size());
  for (const auto& k : out.features.keypoints) out.positions.push_back(apply_homography(view.to_photo, k.position));
  return out;
}

IdentificationResult identify_interface(std::span<const CameraShot> photos, const InterfaceStore& store) {
  if (store.empty()) throw Error(ErrorKind::InsufficientFeatures, "interface store is empty");
  const VisionConfig& config = store.config();
  IdentificationResult result;
  // Rectify once per distinct reference scale.
  std::map<double, std::vector<PhotoFeatures>> by_scale;
  for (const auto& iface : store.interfaces()) {
    const double scale = iface.record->mm_per_pixel;
    auto it = by_scale.find(scale);
    if (it == by_scale.end()) {
      std::vector<PhotoFeatures> feats;
      for (const auto& p : photos) feats.push_back(photo_features(p, scale, config));
      it = by_scale.emplace(scale, std::move(feats)).first;
    }
    int total = 0;
    const auto& ref = iface.home().features.descriptors;
    for (const auto& pf : it->second) total += static_cast<int>(match_descriptors(pf.features.descriptors, ref, config.ratio).size());
    result.scores[iface.record->interface_id] = total;
    if (total > result.match_count) {
      result.match_count = total;
      result.interface_id = iface.record->interface_id;
    }
  }
  const int needed = config.min_inliers * static_cast<int>(photos.size());
  if (result.match_count < needed) {
    throw Error(ErrorKind::InsufficientFeatures, "best interface gathers only " + std::to_string(result.match_count) +
                                                     " matches (need " + std::to_string(needed) + ")");
  }
  return result;
}

std::string identify_interface(const CameraShot& photo, const InterfaceStore& store) {
  return identify_interface(std::span<const CameraShot>(&photo, 1), store).interface_id;
}

LocalizationResult locate(std::span<const CameraShot, 3> shots, const StoredInterface& iface,
                          std::string_view screen_id, const VisionConfig& config) {
  const InterfaceRecord& rec = *iface.record;
  const ReferenceScreen& ref = iface.screen(screen_id);
  LocalizationResult result;
  result.interface_id = rec.interface_id;
  result.screen_id = std::string(screen_id);

  RansacOptions ransac;
  ransac.threshold_px = config.ransac_threshold_px;
  ransac.max_iters = config.ransac_max_iters;
  ransac.min_inliers = config.min_inliers;
  for (int i = 0; i < 3; ++i) {
    const CameraShot& shot = shots[i];
    const PhotoFeatures pf = photo_features(shot, rec.mm_per_pixel, config);
    const auto matches = match_descriptors(pf.features.descriptors, ref.features.descriptors, config.ratio);
    if (static_cast<int>(matches.size()) < config.min_inliers) {
      throw Error(ErrorKind::InsufficientFeatures,
                  "shot " + std::to_string(i) + " has " + std::to_string(matches.size()) + " matches");
    }
    ransac.seed = config.ransac_seed + static_cast<std::uint64_t>(i);
    HomographyEstimate est;
    try {
      est = estimate_homography(matches, pf.positions, ref.positions, ransac);
    } catch (const Error& e) {
      throw Error(ErrorKind::InsufficientFeatures, "shot " + std::to_string(i) + ": " + e.what());
    }
    result.inlier_counts[i] = est.inlier_count;
    const Point2 center_px = apply_homography(est.homography, shot.model.image_center());
    result.shot_centers[i] = pixel_to_mm(center_px, rec.mm_per_pixel);
  }

  const Circle circle = circumcircle(result.shot_centers[0], result.shot_centers[1], result.shot_centers[2]);
  result.pose.position = circle.center;
  result.fitted_radius_mm = circle.radius;
  std::array<double, 3> offsets{};
  double residual = 0.0;
  for (int i = 0; i < 3; ++i) {
    offsets[i] = bearing_deg(circle.center, result.shot_centers[i]) - shots[i].internal_angle_deg;
    residual = std::max(residual, std::abs(distance(circle.center, result.shot_centers[i]) -
                                           shots[i].model.axis_ground_radius_mm()));
  }
  result.pose.orientation_deg = circular_mean_deg(offsets);
  result.residual_mm = residual;
  if (residual > config.max_residual_mm) {
    throw Error(ErrorKind::HighResidual, "shot centers deviate " + std::to_string(residual) +
                                             " mm from the camera's ground radius");
  }
  return result;
}

LocalizationResult locate(std::span<const CameraShot, 3> shots, const StoredInterface& iface,
                          const VisionConfig& config) {
  return locate(shots, iface, iface.record->home_screen_id, config);
}

}  // namespace kioskbot
