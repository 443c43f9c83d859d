#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nnd {

enum class ErrorCode {
  kInvalidInput,
  kInvalidTour,
  kInvalidConfig,
  kParse,
  kUnsupportedFormat,
  kSizeLimit,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Base exception for every failure the library reports. The code is stable
// and is what the CLI prints in its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures carry the 1-based line number of the offending input line
// (0 when the problem is not tied to a line, e.g. a missing section).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Non-fatal diagnostics (vacuous bounds, references shorter than candidates).
// Defaults to stderr; tests install a capturing sink.
using WarningSink = void (*)(std::string_view);
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace nnd
