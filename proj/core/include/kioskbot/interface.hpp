#pragma once

// Labeled kiosk interfaces: the on-disk database format and the touch state
// machine that stands in for the physical touchscreen.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kioskbot/geometry.hpp"
#include "kioskbot/image.hpp"

namespace kioskbot {

/// Axis-aligned box in screen millimeters; containment is closed on all sides.
struct BBox {
  double x = 0.0, y = 0.0, w = 0.0, h = 0.0;

  bool contains(Point2 p) const { return p.x >= x && p.x <= x + w && p.y >= y && p.y <= y + h; }
  Point2 center() const { return {x + 0.5 * w, y + 0.5 * h}; }
  double area() const { return w * h; }
  /// Closest point of the box to p.
  Point2 clamp(Point2 p) const;
};

struct Element {
  std::string element_id;
  std::string text;
  bool clickable = false;
  BBox bbox_mm;
  std::optional<std::string> target_screen;
};

struct Screen {
  std::string screen_id;
  /// Path as written in the database document (relative to it).
  std::string image_path;
  GrayImage image;
  std::vector<Element> elements;

  const Element* find_element(std::string_view id) const;
};

struct InterfaceRecord {
  std::string interface_id;
  double screen_width_mm = 0.0;
  double screen_height_mm = 0.0;
  double mm_per_pixel = 0.5;
  std::string home_screen_id;
  std::vector<Screen> screens;

  const Screen* find_screen(std::string_view id) const;
  /// Throws SchemaError for unknown ids.
  const Screen& screen(std::string_view id) const;
  const Screen& home() const { return screen(home_screen_id); }
  bool on_screen(Point2 p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= screen_width_mm && p.y <= screen_height_mm;
  }
};

/// Reference-image pixel coordinate <-> screen millimeters. Pixel i covers
/// [i, i+1) * mm_per_pixel, so its sample sits at (i + 0.5) * mm_per_pixel.
inline Point2 pixel_to_mm(Point2 px, double mm_per_pixel) {
  return {(px.x + 0.5) * mm_per_pixel, (px.y + 0.5) * mm_per_pixel};
}
inline Point2 mm_to_pixel(Point2 mm, double mm_per_pixel) {
  return {mm.x / mm_per_pixel - 0.5, mm.y / mm_per_pixel - 0.5};
}

/// Parses and validates one database document; images are resolved relative
/// to `base_dir` and decoded. Throws SchemaError naming the offending node.
InterfaceRecord parse_interface(std::string_view json_text, const std::filesystem::path& base_dir);
InterfaceRecord load_interface(const std::filesystem::path& json_path);
/// Every *.json document in `dir`, ordered by file name.
std::vector<InterfaceRecord> load_database(const std::filesystem::path& dir);
/// Writes the document as `<dir>/<interface_id>.json` plus each screen image
/// at its image_path. Returns the document path.
std::filesystem::path save_interface(const InterfaceRecord& record, const std::filesystem::path& dir);
std::string serialize_interface(const InterfaceRecord& record);

struct TouchOutcome {
  std::optional<std::string> hit;
  bool screen_changed = false;
};

struct TouchEvent {
  double timestamp_s = 0.0;
  Point2 point;
  std::optional<std::string> element_id;
};

/// One kiosk's live state. Elements are z-ordered by list position (later
/// elements sit on top); only clickable elements can be hit.
class Kiosk {
 public:
  explicit Kiosk(std::shared_ptr<const InterfaceRecord> record);

  const InterfaceRecord& interface() const { return *record_; }
  std::shared_ptr<const InterfaceRecord> interface_ptr() const { return record_; }
  const std::string& current_screen_id() const { return current_; }
  const Screen& current_screen() const { return record_->screen(current_); }
  const std::vector<TouchEvent>& touch_log() const { return log_; }

  /// Throws OutOfBounds when p lies outside the screen. Misses are logged too.
  TouchOutcome touch(Point2 p, double timestamp_s);
  void reset_to_home();

 private:
  std::shared_ptr<const InterfaceRecord> record_;
  std::string current_;
  std::vector<TouchEvent> log_;
};

struct ScreenRaster {
  const GrayImage& image;
  double mm_per_pixel;
};

ScreenRaster current_screen_image(const Kiosk& kiosk);

}  // namespace kioskbot
