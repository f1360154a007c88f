#pragma once

// End-to-end task scripts: place the bot, localize, then drive a list of
// selections from the phone side, moving the bot once when the server asks.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kioskbot/bot.hpp"
#include "kioskbot/camera.hpp"
#include "kioskbot/protocol.hpp"
#include "kioskbot/server.hpp"

namespace kioskbot {

struct ScenarioSpec {
  std::string name;
  std::string interface_id;
  Point2 placement;
  double orientation_deg = 0.0;
  std::vector<std::string> selections;
  /// Where the user moves the bot, relative to its current spot, when a
  /// target lies under the base. Without it, relocation ends the scenario.
  std::optional<Point2> relocation_offset_mm;
  std::optional<std::string> expect_final_screen;
  std::optional<int> expect_hits;
  std::optional<int> expect_relocations;
  bool perturbed = true;
  std::uint64_t seed = 0;
};

/// Throws SchemaError naming the bad field.
ScenarioSpec parse_scenario(const Json& doc);
ScenarioSpec load_scenario(const std::filesystem::path& path);

struct ScenarioReport {
  std::string name;
  bool completed = false;
  /// Completed and every expectation in the spec held.
  bool success = false;
  std::string failure;
  std::vector<TouchReport> touches;
  std::vector<std::string> selected;
  int hits = 0;
  int relocations = 0;
  /// Kiosk touch events that do not belong to a commanded touch.
  int unintended_touches = 0;
  bool contacts_inside_targets = true;
  std::vector<std::string> screens_visited;
  std::string final_screen;
  double total_sim_time_s = 0.0;
  /// JSON-lines transcript of every message seen by the bot and the phone.
  std::vector<Json> transcript;
};

struct DeviceSettings {
  ErrorModel errors;
  CameraModel camera;
  /// Applied when the spec asks for a perturbed camera.
  PerturbationModel perturb = PerturbationModel::standard();
};

/// Runs the script over two links to the same server. The simulated devices
/// live on the caller's side of the links.
ScenarioReport drive_scenario(const ScenarioSpec& spec, std::shared_ptr<const InterfaceRecord> record, Link& phone,
                              Link& bot, const DeviceSettings& devices = {});

/// drive_scenario over in-process links to `core`.
ScenarioReport full_scenario(ServerCore& core, const ScenarioSpec& spec, const DeviceSettings& devices = {});

}  // namespace kioskbot
