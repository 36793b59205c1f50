#pragma once

#include <stdexcept>
#include <string>

namespace bihflow {

enum class ErrorCode {
  InvalidArgument,
  InvalidTime,
  UnsupportedOrder,
  InsufficientResolution,
  ScaleUnresolvable,
  TimeMisaligned,
  ManifoldTubeExit,
  ContractionFailure,
  ConfigParse,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Library-wide exception. The code identifies the failure class so callers
/// (CLI, bindings) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace bihflow
