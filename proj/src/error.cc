#include "segfst/error.h"

namespace segfst {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kAlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::kUnsupportedEpsilon: return "UnsupportedEpsilon";
    case ErrorCode::kNotAcyclic: return "NotAcyclic";
    case ErrorCode::kInvalidState: return "InvalidState";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNotWellformed: return "NotWellformed";
    case ErrorCode::kScorerUnavailable: return "ScorerUnavailable";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace segfst
