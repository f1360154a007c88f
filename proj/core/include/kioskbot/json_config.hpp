#pragma once

// JSON forms of the tunable models, as accepted on the command line either
// inline ("{...}") or as a file path. Missing keys keep their defaults.

#include <string>

#include "kioskbot/bot.hpp"
#include "kioskbot/camera.hpp"
#include "kioskbot/protocol.hpp"

namespace kioskbot {

/// Inline JSON when the text starts with '{', otherwise a file to read.
/// Throws SchemaError or Io.
Json read_json_argument(const std::string& text_or_path);

ErrorModel parse_error_model(const Json& doc, ErrorModel defaults = {});
PerturbationModel parse_perturbation(const Json& doc, PerturbationModel defaults = PerturbationModel::standard());

}  // namespace kioskbot
