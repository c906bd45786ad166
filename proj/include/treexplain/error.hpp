#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace treexplain {

enum class ErrorKind {
  kMalformed,
  kIndexOutOfRange,
  kCoverMismatch,
  kLeafInconsistency,
  kDepthExceeded,
  kDimensionMismatch,
  kTooManyFeatures,
  kDegenerateElement,
  kInsufficientRows,
  kEmptyData,
  kDegenerateInput,
  kInvalidArgument,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported through this exception type. The kind is
// stable and meant for programmatic dispatch; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace treexplain
