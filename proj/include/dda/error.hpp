#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dda {

enum class ErrorCode {
  kMalformedStream,
  kMissingTables,
  kUnsupportedMode,
  kOutOfRange,
  kTooSmall,
  kNonFinite,
  kWrongKind,
  kShapeMismatch,
  kEmptyBand,
  kMissingFile,
  kIo,
  kNoPairs,
  kAmbiguousMatch,
  kManifestCorrupt,
  kAllEntriesFailed,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the toolkit carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch on the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace dda
