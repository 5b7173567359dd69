#include "polytrain/error.hpp"

namespace polytrain {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kOutOfWorkspace: return "OutOfWorkspace";
    case ErrorCode::kNumericalBlowup: return "NumericalBlowup";
    case ErrorCode::kEmptyLog: return "EmptyLog";
    case ErrorCode::kMalformedLog: return "MalformedLog";
    case ErrorCode::kValidation: return "Validation";
    case ErrorCode::kDegenerateGroups: return "DegenerateGroups";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace polytrain
