#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "json.hpp"

namespace wcl {

/// Machine-readable failure categories. Every rejection carries one of these
/// plus a witness payload, so callers (and the CLI) can report exactly what
/// broke without parsing prose.
enum class ErrorCode {
  InvalidSpec,
  TruncationTooSmall,
  EmptyRegion,
  SpaceMismatch,
  NotContinuous,
  NotProper,
  OutputNotC0,
  UnboundedWeight,
  TooLargeForDefinitionalCheck,
  NotIsometry,
  EmptyPeakSet,
  NotDP,
  BlowupAmbiguous,
  NotBijective,
  ModeCheckFailed,
  GridTooCoarse,
  IoError,
  ParseError,
};

const char* to_string(ErrorCode code);

/// Exception type used across the library. `detail()` holds the structured
/// witness (indices, coordinates, offending values) for the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        nlohmann::ordered_json detail = nlohmann::ordered_json::object())
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::ordered_json& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  nlohmann::ordered_json detail_;
};

}  // namespace wcl
