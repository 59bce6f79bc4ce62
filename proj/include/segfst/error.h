// Error type shared by every segfst module.

#pragma once

#include <stdexcept>
#include <string>

namespace segfst {

enum class ErrorCode {
  kEmptyInput,
  kAlphabetMismatch,
  kUnsupportedEpsilon,
  kNotAcyclic,
  kInvalidState,
  kInvalidArgument,
  kInvalidSpec,
  kLengthMismatch,
  kNotWellformed,
  kScorerUnavailable,
  kEmptyCorpus,
  kParse,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace segfst
