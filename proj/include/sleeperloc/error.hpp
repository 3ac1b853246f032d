#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sleeperloc {

enum class ErrorKind {
  DegenerateConfiguration,
  WrongArity,
  PointAtInfinity,
  ZeroBaseline,
  NegativeDistance,
  OutOfRoute,
  InfeasibleProfile,
  ConfigInvalid,
  InputKindMismatch,
  NonPositiveInterval,
  EmptySeries,
  LengthMismatch,
  UnknownFormat,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sleeperloc
