#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace elmdetect {

enum class ErrorCode {
  kFileNotFound,
  kMalformedRow,
  kMissingTextColumn,
  kTooFewDocuments,
  kMalformedLine,
  kEmptyTrainingSet,
  kIndexOutOfVocab,
  kSequenceTooShort,
  kEmptySequence,
  kDimensionMismatch,
  kShapeMismatch,
  kSingleClassTrainingSet,
  kLengthMismatch,
  kEmptyInput,
  kEmptyMatrix,
  kSingleClassLabels,
  kAllZeroDifferences,
  kTooFewPairs,
  kZeroVariance,
  kInvalidArgument,
  kLeakage,
  kFormat,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library is reported through this type so
// callers (the CLI in particular) can map the code onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace elmdetect
