#include "kioskbot/error.hpp"

namespace kioskbot {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PointAtInfinity: return "PointAtInfinity";
    case ErrorKind::CollinearPoints: return "CollinearPoints";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::InsufficientFeatures: return "InsufficientFeatures";
    case ErrorKind::HighResidual: return "HighResidual";
    case ErrorKind::OutOfReach: return "OutOfReach";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::TooCloseToEdge: return "TooCloseToEdge";
    case ErrorKind::Occluded: return "Occluded";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ImageFormat: return "ImageFormat";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Protocol: return "Protocol";
  }
  return "Unknown";
}

}  // namespace kioskbot
