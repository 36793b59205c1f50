#include "bihflow/error.hpp"

namespace bihflow {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::InvalidTime: return "invalid-time";
    case ErrorCode::UnsupportedOrder: return "unsupported-order";
    case ErrorCode::InsufficientResolution: return "insufficient-resolution";
    case ErrorCode::ScaleUnresolvable: return "scale-unresolvable";
    case ErrorCode::TimeMisaligned: return "time-misaligned";
    case ErrorCode::ManifoldTubeExit: return "manifold-tube-exit";
    case ErrorCode::ContractionFailure: return "contraction-failure";
    case ErrorCode::ConfigParse: return "config-parse-error";
    case ErrorCode::Io: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace bihflow
