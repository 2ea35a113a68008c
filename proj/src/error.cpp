#include "dda/error.hpp"

namespace dda {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedStream: return "MalformedStream";
    case ErrorCode::kMissingTables: return "MissingTables";
    case ErrorCode::kUnsupportedMode: return "UnsupportedMode";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kWrongKind: return "WrongKind";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyBand: return "EmptyBand";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kNoPairs: return "NoPairs";
    case ErrorCode::kAmbiguousMatch: return "AmbiguousMatch";
    case ErrorCode::kManifestCorrupt: return "ManifestCorrupt";
    case ErrorCode::kAllEntriesFailed: return "AllEntriesFailed";
  }
  return "Unknown";
}

}  // namespace dda
