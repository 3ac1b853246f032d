#include "sleeperloc/error.hpp"

namespace sleeperloc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::WrongArity: return "WrongArity";
    case ErrorKind::PointAtInfinity: return "PointAtInfinity";
    case ErrorKind::ZeroBaseline: return "ZeroBaseline";
    case ErrorKind::NegativeDistance: return "NegativeDistance";
    case ErrorKind::OutOfRoute: return "OutOfRoute";
    case ErrorKind::InfeasibleProfile: return "InfeasibleProfile";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::InputKindMismatch: return "InputKindMismatch";
    case ErrorKind::NonPositiveInterval: return "NonPositiveInterval";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::UnknownFormat: return "UnknownFormat";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace sleeperloc
