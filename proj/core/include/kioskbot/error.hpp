#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kioskbot {

/// Failure categories surfaced by the library. Every thrown kioskbot::Error
/// carries exactly one of these.
enum class ErrorKind {
  PointAtInfinity,
  CollinearPoints,
  DegenerateConfiguration,
  InsufficientFeatures,
  HighResidual,
  OutOfReach,
  OutOfBounds,
  TooCloseToEdge,
  Occluded,
  SchemaError,
  ImageFormat,
  Io,
  Protocol,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kioskbot
