#include "kioskbot/interface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "kioskbot/error.hpp"

namespace kioskbot {

using nlohmann::json;

namespace {

// Slack for bounding boxes that touch the screen edge after float round trips.
constexpr double kBoundsSlackMm = 1e-6;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::SchemaError, path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "/" + key, "missing field");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) schema_error(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) schema_error(path + "/" + key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(path + "/" + key, "expected a finite number");
  return d;
}

bool require_bool(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_boolean()) schema_error(path + "/" + key, "expected a boolean");
  return v.get<bool>();
}

}  // namespace

Point2 BBox::clamp(Point2 p) const {
  return {std::clamp(p.x, x, x + w), std::clamp(p.y, y, y + h)};
}

const Element* Screen::find_element(std::string_view id) const {
  auto it = std::find_if(elements.begin(), elements.end(), [&](const Element& e) { return e.element_id == id; });
  return it == elements.end() ? nullptr : &*it;
}

const Screen* InterfaceRecord::find_screen(std::string_view id) const {
  auto it = std::find_if(screens.begin(), screens.end(), [&](const Screen& s) { return s.screen_id == id; });
  return it == screens.end() ? nullptr : &*it;
}

const Screen& InterfaceRecord::screen(std::string_view id) const {
  if (const Screen* s = find_screen(id)) return *s;
  throw Error(ErrorKind::SchemaError, "interface " + interface_id + " has no screen " + std::string(id));
}

InterfaceRecord parse_interface(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, std::string("document is not valid JSON: ") + e.what());
  }
  InterfaceRecord rec;
  rec.interface_id = require_string(doc, "interface_id", "");
  rec.screen_width_mm = require_number(doc, "screen_width_mm", "");
  rec.screen_height_mm = require_number(doc, "screen_height_mm", "");
  rec.mm_per_pixel = require_number(doc, "mm_per_pixel", "");
  rec.home_screen_id = require_string(doc, "home_screen_id", "");
  if (rec.screen_width_mm <= 0.0) schema_error("/screen_width_mm", "must be positive");
  if (rec.screen_height_mm <= 0.0) schema_error("/screen_height_mm", "must be positive");
  if (rec.mm_per_pixel <= 0.0) schema_error("/mm_per_pixel", "must be positive");

  const json& screens = require(doc, "screens", "");
  if (!screens.is_array() || screens.empty()) schema_error("/screens", "expected a non-empty array");
  const int expected_w = static_cast<int>(std::lround(rec.screen_width_mm / rec.mm_per_pixel));
  const int expected_h = static_cast<int>(std::lround(rec.screen_height_mm / rec.mm_per_pixel));

  std::set<std::string> screen_ids;
  for (std::size_t si = 0; si < screens.size(); ++si) {
    const std::string spath = "/screens/" + std::to_string(si);
    const json& sj = screens[si];
    Screen screen;
    screen.screen_id = require_string(sj, "screen_id", spath);
    if (!screen_ids.insert(screen.screen_id).second) {
      schema_error(spath + "/screen_id", "duplicate screen id '" + screen.screen_id + "'");
    }
    screen.image_path = require_string(sj, "image", spath);
    const json& elements = require(sj, "elements", spath);
    if (!elements.is_array()) schema_error(spath + "/elements", "expected an array");
    std::set<std::string> element_ids;
    for (std::size_t ei = 0; ei < elements.size(); ++ei) {
      const std::string epath = spath + "/elements/" + std::to_string(ei);
      const json& ej = elements[ei];
      Element e;
      e.element_id = require_string(ej, "element_id", epath);
      if (!element_ids.insert(e.element_id).second) {
        schema_error(epath + "/element_id", "duplicate element id '" + e.element_id + "'");
      }
      e.text = require_string(ej, "text", epath);
      e.clickable = require_bool(ej, "clickable", epath);
      const json& bb = require(ej, "bbox_mm", epath);
      if (!bb.is_array() || bb.size() != 4 || !std::all_of(bb.begin(), bb.end(), [](const json& v) { return v.is_number(); })) {
        schema_error(epath + "/bbox_mm", "expected [x, y, w, h]");
      }
      e.bbox_mm = {bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(), bb[3].get<double>()};
      const BBox& b = e.bbox_mm;
      if (b.w < 0.0 || b.h < 0.0) schema_error(epath + "/bbox_mm", "negative extent");
      if (b.x < -kBoundsSlackMm || b.y < -kBoundsSlackMm || b.x + b.w > rec.screen_width_mm + kBoundsSlackMm ||
          b.y + b.h > rec.screen_height_mm + kBoundsSlackMm) {
        schema_error(epath + "/bbox_mm", "element '" + e.element_id + "' lies outside the screen");
      }
      if (e.clickable && b.area() <= 0.0) schema_error(epath + "/bbox_mm", "clickable element needs a positive area");
      if (auto it = ej.find("target_screen"); it != ej.end() && !it->is_null()) {
        if (!it->is_string()) schema_error(epath + "/target_screen", "expected a string");
        if (!e.clickable) schema_error(epath + "/target_screen", "only clickable elements may navigate");
        e.target_screen = it->get<std::string>();
      }
      screen.elements.push_back(std::move(e));
    }
    rec.screens.push_back(std::move(screen));
  }

  if (!rec.find_screen(rec.home_screen_id)) {
    schema_error("/home_screen_id", "unknown screen '" + rec.home_screen_id + "'");
  }
  for (std::size_t si = 0; si < rec.screens.size(); ++si) {
    for (std::size_t ei = 0; ei < rec.screens[si].elements.size(); ++ei) {
      const Element& e = rec.screens[si].elements[ei];
      if (e.target_screen && !rec.find_screen(*e.target_screen)) {
        schema_error("/screens/" + std::to_string(si) + "/elements/" + std::to_string(ei) + "/target_screen",
                     "element '" + e.element_id + "' targets unknown screen '" + *e.target_screen + "'");
      }
    }
  }

  for (std::size_t si = 0; si < rec.screens.size(); ++si) {
    Screen& s = rec.screens[si];
    const std::string ipath = "/screens/" + std::to_string(si) + "/image";
    try {
      s.image = read_png(base_dir / s.image_path);
    } catch (const Error& e) {
      schema_error(ipath, e.what());
    }
    if (s.image.width() != expected_w || s.image.height() != expected_h) {
      schema_error(ipath, "image is " + std::to_string(s.image.width()) + "x" + std::to_string(s.image.height()) +
                              " px, expected " + std::to_string(expected_w) + "x" + std::to_string(expected_h));
    }
  }
  return rec;
}

InterfaceRecord load_interface(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + json_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_interface(ss.str(), json_path.parent_path());
  } catch (const Error& e) {
    throw Error(e.kind(), json_path.filename().string() + " " + e.what());
  }
}

std::vector<InterfaceRecord> load_database(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> docs;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") docs.push_back(entry.path());
  }
  if (ec) throw Error(ErrorKind::Io, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(docs.begin(), docs.end());
  std::vector<InterfaceRecord> out;
  for (const auto& p : docs) out.push_back(load_interface(p));
  return out;
}

std::string serialize_interface(const InterfaceRecord& record) {
  json doc;
  doc["interface_id"] = record.interface_id;
  doc["screen_width_mm"] = record.screen_width_mm;
  doc["screen_height_mm"] = record.screen_height_mm;
  doc["mm_per_pixel"] = record.mm_per_pixel;
  doc["home_screen_id"] = record.home_screen_id;
  doc["screens"] = json::array();
  for (const auto& s : record.screens) {
    json sj;
    sj["screen_id"] = s.screen_id;
    sj["image"] = s.image_path;
    sj["elements"] = json::array();
    for (const auto& e : s.elements) {
      json ej;
      ej["element_id"] = e.element_id;
      ej["text"] = e.text;
      ej["clickable"] = e.clickable;
      ej["bbox_mm"] = {e.bbox_mm.x, e.bbox_mm.y, e.bbox_mm.w, e.bbox_mm.h};
      if (e.target_screen) ej["target_screen"] = *e.target_screen;
      sj["elements"].push_back(std::move(ej));
    }
    doc["screens"].push_back(std::move(sj));
  }
  return doc.dump(2);
}

std::filesystem::path save_interface(const InterfaceRecord& record, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& s : record.screens) {
    const auto image_path = dir / s.image_path;
    std::filesystem::create_directories(image_path.parent_path());
    write_png(s.image, image_path);
  }
  const auto doc_path = dir / (record.interface_id + ".json");
  std::ofstream out(doc_path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + doc_path.string());
  out << serialize_interface(record) << "\n";
  return doc_path;
}

Kiosk::Kiosk(std::shared_ptr<const InterfaceRecord> record)
    : record_(std::move(record)), current_(record_->home_screen_id) {}

TouchOutcome Kiosk::touch(Point2 p, double timestamp_s) {
  if (!record_->on_screen(p)) {
    throw Error(ErrorKind::OutOfBounds, "touch at (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                            ") mm is off the screen");
  }
  const Screen& screen = current_screen();
  const Element* hit = nullptr;
  for (const auto& e : screen.elements) {
    if (e.clickable && e.bbox_mm.contains(p)) hit = &e;
  }
  TouchOutcome outcome;
  if (hit) {
    outcome.hit = hit->element_id;
    if (hit->target_screen && *hit->target_screen != current_) {
      current_ = *hit->target_screen;
      outcome.screen_changed = true;
    }
  }
  log_.push_back({timestamp_s, p, outcome.hit});
  return outcome;
}

void Kiosk::reset_to_home() { current_ = record_->home_screen_id; }

ScreenRaster current_screen_image(const Kiosk& kiosk) {
  return {kiosk.current_screen().image, kiosk.interface().mm_per_pixel};
}

}  // namespace kioskbot
