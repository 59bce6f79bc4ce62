// Segmentation of a token sequence and the delimiter encoding used in text
// I/O and in decoder output.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segfst/error.h"
#include "segfst/symbol_table.h"

namespace segfst {

/// Tokens of one passage.
struct TokenSeq {
  std::string id;
  std::vector<std::string> tokens;

  size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

/// Internal boundaries of an n-token passage. A boundary at position i sits
/// before token i, so valid positions lie in [1, n-1].
class Segmentation {
 public:
  Segmentation() = default;
  /// Sorts and de-duplicates; throws kInvalidArgument on out-of-range
  /// positions.
  Segmentation(size_t length, std::vector<size_t> boundaries);

  size_t length() const { return length_; }
  const std::vector<size_t>& boundaries() const { return boundaries_; }
  size_t num_segments() const { return boundaries_.size() + 1; }
  bool Contains(size_t position) const;

  std::vector<size_t> SegmentLengths() const;

  /// Tokens with "<SENT>" between segments.
  std::vector<std::string> Render(std::span<const std::string> tokens) const;

  friend bool operator==(const Segmentation&, const Segmentation&) = default;

 private:
  size_t length_ = 0;
  std::vector<size_t> boundaries_;
};

enum class MalformedReason {
  kTokenMismatch,
  kDoubleDelimiter,
  kLeadingDelimiter,
  kTrailingDelimiter,
  kLengthMismatch,
};

const char* MalformedReasonName(MalformedReason reason);

class NotWellformedError : public Error {
 public:
  NotWellformedError(MalformedReason reason, const std::string& detail)
      : Error(ErrorCode::kNotWellformed,
              std::string(MalformedReasonName(reason)) + ": " + detail),
        reason_(reason) {}

  MalformedReason reason() const { return reason_; }

 private:
  MalformedReason reason_;
};

/// Reads boundaries from generated labels, which must reproduce `input`
/// with at most one delimiter between consecutive tokens. Throws
/// NotWellformedError otherwise.
Segmentation ParseSegmentation(std::span<const Label> generated,
                               std::span<const Label> input);

/// A delimited line split into its tokens and boundaries. Throws
/// NotWellformedError for leading, trailing or doubled delimiters.
struct DelimitedText {
  std::vector<std::string> tokens;
  Segmentation segmentation;
};
DelimitedText ParseDelimited(std::span<const std::string> words);

std::vector<std::string> SplitWhitespace(std::string_view line);
/// Whitespace split that also separates delimiters glued to neighbouring
/// text, so "a<SENT><SENT>b" yields {"a", "<SENT>", "<SENT>", "b"}.
std::vector<std::string> TokenizeDelimitedLine(std::string_view line);
std::string JoinTokens(std::span<const std::string> tokens);

}  // namespace segfst
