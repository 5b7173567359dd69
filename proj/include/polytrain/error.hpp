#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polytrain {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidConfig,
  kOutOfWorkspace,
  kNumericalBlowup,
  kEmptyLog,
  kMalformedLog,
  kValidation,
  kDegenerateGroups,
  kZeroVariance,
  kVersionMismatch,
  kIo,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Errors tied to a line of a JSONL log. Line numbers are 1-based.
class LogError : public Error {
 public:
  LogError(ErrorCode code, std::size_t line, const std::string& what)
      : Error(code, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace polytrain
