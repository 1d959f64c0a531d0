#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace applause {

enum class ErrorCode {
  kEmptyTranscript,
  kInvalidWindow,
  kParse,
  kRegistryMismatch,
  kNumericalFailure,
  kCvFailure,
  kImportanceUndefined,
  kModelMismatch,
  kDimensionMismatch,
  kMissingResource,
  kInvalidArgument,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal diagnostics (dropped markers, skipped folds, absent window points).
// Defaults to stderr; tests may capture.
using WarningSink = void (*)(std::string_view);
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace applause
