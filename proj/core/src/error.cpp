#include "alselect/error.hpp"

namespace alselect {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kMissingInstance: return "MissingInstance";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kNegativeLoss: return "NegativeLoss";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kBadK: return "BadK";
    case ErrorCode::kMissingScores: return "MissingScores";
    case ErrorCode::kNoLabeledData: return "NoLabeledData";
    case ErrorCode::kBadStageList: return "BadStageList";
    case ErrorCode::kEmptyTestSet: return "EmptyTestSet";
    case ErrorCode::kUnlabeledPoolInstance: return "UnlabeledPoolInstance";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace alselect
