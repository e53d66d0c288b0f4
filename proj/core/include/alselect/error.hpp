#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace alselect {

enum class ErrorCode {
  kIo,
  kConfig,
  kMalformedRecord,
  kUnknownLabel,
  kInsufficientData,
  kSchemaMismatch,
  kLengthMismatch,
  kMissingInstance,
  kNonFiniteValue,
  kNegativeLoss,
  kDimMismatch,
  kEmptyInput,
  kBadK,
  kMissingScores,
  kNoLabeledData,
  kBadStageList,
  kEmptyTestSet,
  kUnlabeledPoolInstance,
};

/// Short stable name of an error code, e.g. "LengthMismatch".
std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above. The
/// message is prefixed with the code name so CLI output names the module error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace alselect
