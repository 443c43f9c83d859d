#include "nnd/error.hpp"

#include <atomic>
#include <iostream>

namespace nnd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kInvalidTour: return "invalid-tour";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kUnsupportedFormat: return "unsupported-format";
    case ErrorCode::kSizeLimit: return "size-limit";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(ErrorCode::kParse,
            line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

namespace {

void stderr_sink(std::string_view message) {
  std::cerr << "warning: " << message << '\n';
}

std::atomic<WarningSink> g_sink{&stderr_sink};

}  // namespace

void set_warning_sink(WarningSink sink) {
  g_sink.store(sink ? sink : &stderr_sink);
}

void warn(std::string_view message) { g_sink.load()(message); }

}  // namespace nnd
