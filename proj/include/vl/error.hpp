#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vl {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kDegenerateVector,
  kAntipodalVectors,
  kNonPositiveWeight,
  kNotFound,
  kProviderUnavailable,
  kBadPayload,
  kMalformedDocument,
  kFileUnreadable,
  kUnknownTemplate,
  kEmptyIndex,
  kInternal,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above; the
/// service maps them onto its API error taxonomy.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace vl
