#pragma once

// Procedurally rendered kiosk interfaces used by the tests, the evaluation
// harness and the demo server. All output is deterministic.

#include <filesystem>
#include <string>
#include <vector>

#include "kioskbot/interface.hpp"

namespace kioskbot::fixtures {

inline constexpr double kMmPerPixel = 0.5;

inline constexpr const char* kLocker = "locker_12";
inline constexpr const char* kAirport = "airport_21";
inline constexpr const char* kRestaurant = "restaurant_27";
inline constexpr const char* kMallMap = "mallmap_40";
inline constexpr const char* kMonochrome = "mono_12";
inline constexpr const char* kBubbleTea = "bubble_tea_24";

/// The five evaluation interfaces in order: four feature-rich, then monochrome.
std::vector<std::string> evaluation_ids();

/// 16:9 screen extent for a diagonal in inches, snapped to the pixel grid.
std::pair<double, double> screen_size_mm(double diagonal_in);

InterfaceRecord build(const std::string& interface_id);
std::vector<InterfaceRecord> build_all();
/// Renders every fixture into `dir` (documents plus PNGs).
void write_database(const std::filesystem::path& dir);

}  // namespace kioskbot::fixtures
