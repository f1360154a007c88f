#include "kioskbot/json_config.hpp"

#include <fstream>
#include <sstream>

#include "kioskbot/error.hpp"

namespace kioskbot {

namespace {

template <typename T>
void take(const Json& doc, const char* key, T& out) {
  const auto it = doc.find(key);
  if (it == doc.end()) return;
  try {
    out = it->get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorKind::SchemaError, std::string("/") + key + ": wrong type");
  }
}

void require_object(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::SchemaError, "expected a JSON object");
}

}  // namespace

Json read_json_argument(const std::string& text_or_path) {
  std::string text = text_or_path;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') {
    std::ifstream in(text_or_path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + text_or_path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::SchemaError, "not valid JSON: " + text_or_path);
  return doc;
}

ErrorModel parse_error_model(const Json& doc, ErrorModel m) {
  require_object(doc);
  take(doc, "rotation_sigma_deg", m.rotation_sigma_deg);
  take(doc, "extension_noise_sigma_mm", m.extension_noise_sigma_mm);
  take(doc, "quantize", m.quantize);
  take(doc, "seed", m.seed);
  if (m.rotation_sigma_deg < 0.0 || m.extension_noise_sigma_mm < 0.0) {
    throw Error(ErrorKind::SchemaError, "error model sigmas must be non-negative");
  }
  return m;
}

PerturbationModel parse_perturbation(const Json& doc, PerturbationModel p) {
  require_object(doc);
  take(doc, "pixel_noise_sigma", p.pixel_noise_sigma);
  take(doc, "gamma", p.gamma);
  take(doc, "blur_radius_px", p.blur_radius_px);
  take(doc, "pointing_jitter_deg", p.pointing_jitter_deg);
  take(doc, "seed", p.seed);
  if (p.pixel_noise_sigma < 0.0 || p.blur_radius_px < 0.0 || p.pointing_jitter_deg < 0.0 || p.gamma < 0.5 ||
      p.gamma > 2.0) {
    throw Error(ErrorKind::SchemaError, "perturbation values out of range");
  }
  return p;
}

}  // namespace kioskbot
