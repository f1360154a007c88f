#pragma once

// Seeded re-runs of the accuracy experiments against the simulator:
// localization over canonical placements, pole rotation over a protractor
// sweep, and reel extension over a ruler sweep.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kioskbot/bot.hpp"
#include "kioskbot/camera.hpp"
#include "kioskbot/localization.hpp"
#include "kioskbot/scenario.hpp"
#include "kioskbot/server.hpp"

namespace kioskbot {

struct EvalConfig {
  /// Interface ids; empty means the five evaluation fixtures.
  std::vector<std::string> fixtures;
  int trials = 3;
  PerturbationModel perturbation = PerturbationModel::standard();
  ErrorModel errors;
  CameraModel camera;
  std::uint64_t seed = 0;
  /// Near-corner placements sit this far in from both edges.
  double corner_inset_mm = BotGeometry{}.base_radius_mm + 5.0;
  /// Uniform spread of the hand-placed base orientation per trial.
  double placement_jitter_deg = 5.0;
  std::vector<double> rotation_angles_deg{0, 30, 60, 90, 120, 150, 180};
  std::vector<double> extension_lengths_mm{0,   50,  100, 150, 200, 250, 300, 350,
                                           400, 450, 500, 550, 600, 650, 700};
};

/// Throws DegenerateConfiguration for unusable settings, including any
/// extension length beyond the reel's reach.
void validate(const EvalConfig& config);

/// Deterministic per-trial seed from a base seed and trial coordinates.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Four near-corner points (top-left, top-right, bottom-left, bottom-right)
/// followed by the screen center.
std::vector<Point2> canonical_points(const InterfaceRecord& record, double inset_mm);
/// Base orientation that puts the middle shot on the screen center.
double facing_orientation_deg(const InterfaceRecord& record, Point2 position);

struct LocalizationRow {
  std::string fixture;
  int point = 0;
  int trial = 0;
  BotPose truth;
  /// "ok", or the failure kind (e.g. "InsufficientFeatures", "Misidentified").
  std::string status;
  std::string identified;
  BotPose estimate;
  double error_mm = 0.0;
  double orientation_error_deg = 0.0;
  bool ok() const { return status == "ok"; }
};

struct FixtureSummary {
  std::string fixture;
  int trials = 0;
  int failures = 0;
  int insufficient_features = 0;
  double mean_error_mm = 0.0;
  double sd_error_mm = 0.0;
  double max_orientation_error_deg = 0.0;
};

struct LocalizationTable {
  std::vector<LocalizationRow> rows;
  std::vector<FixtureSummary> fixtures;
  /// Over every successful row.
  double grand_mean_mm = 0.0;
  double grand_sd_mm = 0.0;
};

LocalizationTable eval_localization(const InterfaceStore& store, const EvalConfig& config);

struct RotationRow {
  int trial = 0;
  std::string direction;  // "clockwise" (0 -> 180) or "counterclockwise" (180 -> 0)
  double commanded_deg = 0.0;
  double realized_deg = 0.0;
  double error_deg = 0.0;
};

struct RotationTable {
  std::vector<RotationRow> rows;
  /// Mean signed error per direction and angle, in config order.
  std::vector<std::vector<double>> mean_signed_error;
  double grand_mean_abs_deg = 0.0;
  double sd_abs_deg = 0.0;
};

RotationTable eval_rotation(const EvalConfig& config);

struct ExtensionRow {
  int trial = 0;
  std::string direction;  // "extend" or "retract"
  double commanded_mm = 0.0;
  double realized_mm = 0.0;
  double abs_error_mm = 0.0;
};

struct ExtensionTable {
  std::vector<ExtensionRow> rows;
  double grand_mean_mm = 0.0;
  double sd_mm = 0.0;
  double max_error_mm = 0.0;
};

ExtensionTable eval_extension(const EvalConfig& config);

/// Starts a server on an ephemeral loopback port and drives the scenario
/// through it over real sockets, bot and phone on separate connections.
ScenarioReport run_scenario(std::shared_ptr<const InterfaceStore> store, const ScenarioSpec& spec,
                            const DeviceSettings& devices = {}, const ServerOptions& options = {});

void write_csv(std::ostream& out, const LocalizationTable& table);
void write_csv(std::ostream& out, const RotationTable& table);
void write_csv(std::ostream& out, const ExtensionTable& table);
/// One row per executed touch.
void write_csv(std::ostream& out, const ScenarioReport& report);
void write_transcript(std::ostream& out, const ScenarioReport& report);

}  // namespace kioskbot
