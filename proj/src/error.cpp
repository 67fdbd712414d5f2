#include "vl/error.hpp"

namespace vl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDegenerateVector: return "DegenerateVector";
    case ErrorCode::kAntipodalVectors: return "AntipodalVectors";
    case ErrorCode::kNonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kBadPayload: return "BadPayload";
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kFileUnreadable: return "FileUnreadable";
    case ErrorCode::kUnknownTemplate: return "UnknownTemplate";
    case ErrorCode::kEmptyIndex: return "EmptyIndex";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Internal";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace vl
