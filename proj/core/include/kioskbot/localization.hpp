#pragma once

// Server-side localization: identify which stored interface a set of photos
// shows, then recover the bot pose from the three photo centers.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kioskbot/camera.hpp"
#include "kioskbot/features.hpp"
#include "kioskbot/homography_estimation.hpp"
#include "kioskbot/interface.hpp"

namespace kioskbot {

struct VisionConfig {
  double ratio = kDefaultRatio;
  int min_inliers = 15;
  double ransac_threshold_px = 3.0;
  int ransac_max_iters = 1000;
  std::uint64_t ransac_seed = 0;
  int fast_threshold = 20;
  int photo_max_keypoints = 1000;
  /// Reference images keep up to one keypoint per this many pixels.
  int reference_pixels_per_keypoint = 100;
  int reference_grid_cell_px = 32;
  int reference_border_px = 24;  // black frame added around reference images before detection
  double max_residual_mm = 15.0;
};

/// Reference features of one screen, computed once at load.
struct ReferenceScreen {
  std::string screen_id;
  FeatureSet features;
  std::vector<Point2> positions;
};

struct StoredInterface {
  std::shared_ptr<const InterfaceRecord> record;
  std::vector<ReferenceScreen> screens;

  const ReferenceScreen& screen(std::string_view id) const;
  const ReferenceScreen& home() const { return screen(record->home_screen_id); }
};

/// Immutable after construction; share freely across threads.
class InterfaceStore {
 public:
  InterfaceStore(std::vector<InterfaceRecord> records, const VisionConfig& config = {});
  static InterfaceStore load(const std::filesystem::path& dir, const VisionConfig& config = {});

  const VisionConfig& config() const { return config_; }
  const std::vector<StoredInterface>& interfaces() const { return interfaces_; }
  const StoredInterface* find(std::string_view interface_id) const;
  /// Throws SchemaError for unknown ids.
  const StoredInterface& get(std::string_view interface_id) const;
  bool empty() const { return interfaces_.empty(); }

 private:
  VisionConfig config_;
  std::vector<StoredInterface> interfaces_;
};

FeatureSet reference_features(const GrayImage& screen_image, const VisionConfig& config);

/// Photo features detected on the rectified view; keypoint positions are
/// reported in photo pixels.
struct PhotoFeatures {
  FeatureSet features;
  std::vector<Point2> positions;
};

PhotoFeatures photo_features(const CameraShot& shot, double reference_mm_per_px, const VisionConfig& config);

struct IdentificationResult {
  std::string interface_id;
  int match_count = 0;
  /// Ratio-test match totals per interface id.
  std::map<std::string, int> scores;
};

/// Picks the interface whose home-screen reference gathers the most
/// ratio-test matches, summed over the given photos. Throws
/// InsufficientFeatures when the winner falls below config.min_inliers.
IdentificationResult identify_interface(std::span<const CameraShot> photos, const InterfaceStore& store);
std::string identify_interface(const CameraShot& photo, const InterfaceStore& store);

struct LocalizationResult {
  std::string interface_id;
  std::string screen_id;
  BotPose pose;
  std::array<Point2, 3> shot_centers;
  std::array<int, 3> inlier_counts{};
  /// Largest deviation of a shot center's distance from the pose from the
  /// camera model's nominal ground radius.
  double residual_mm = 0.0;
  double fitted_radius_mm = 0.0;
};

/// Full pose recovery against one screen of a stored interface. Throws
/// InsufficientFeatures, CollinearPoints or HighResidual.
LocalizationResult locate(std::span<const CameraShot, 3> shots, const StoredInterface& iface,
                          std::string_view screen_id, const VisionConfig& config);
LocalizationResult locate(std::span<const CameraShot, 3> shots, const StoredInterface& iface,
                          const VisionConfig& config);

}  // namespace kioskbot
