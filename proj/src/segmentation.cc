#include "segfst/segmentation.h"

#include <algorithm>
#include <sstream>

namespace segfst {

Segmentation::Segmentation(size_t length, std::vector<size_t> boundaries)
    : length_(length), boundaries_(std::move(boundaries)) {
  std::sort(boundaries_.begin(), boundaries_.end());
  boundaries_.erase(std::unique(boundaries_.begin(), boundaries_.end()),
                    boundaries_.end());
  for (size_t b : boundaries_) {
    if (b == 0 || b >= length_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "boundary " + std::to_string(b) + " outside (0, " +
                      std::to_string(length_) + ")");
    }
  }
}

bool Segmentation::Contains(size_t position) const {
  return std::binary_search(boundaries_.begin(), boundaries_.end(), position);
}

std::vector<size_t> Segmentation::SegmentLengths() const {
  std::vector<size_t> lengths;
  if (length_ == 0) return lengths;
  size_t prev = 0;
  for (size_t b : boundaries_) {
    lengths.push_back(b - prev);
    prev = b;
  }
  lengths.push_back(length_ - prev);
  return lengths;
}

std::vector<std::string> Segmentation::Render(
    std::span<const std::string> tokens) const {
  if (tokens.size() != length_) {
    throw Error(ErrorCode::kLengthMismatch,
                "segmentation over " + std::to_string(length_) +
                    " tokens rendered with " + std::to_string(tokens.size()));
  }
  std::vector<std::string> out;
  out.reserve(tokens.size() + boundaries_.size());
  auto next = boundaries_.begin();
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (next != boundaries_.end() && *next == i) {
      out.emplace_back(kDelimiterSymbol);
      ++next;
    }
    out.push_back(tokens[i]);
  }
  return out;
}

const char* MalformedReasonName(MalformedReason reason) {
  switch (reason) {
    case MalformedReason::kTokenMismatch: return "token-mismatch";
    case MalformedReason::kDoubleDelimiter: return "double-delimiter";
    case MalformedReason::kLeadingDelimiter: return "leading-delimiter";
    case MalformedReason::kTrailingDelimiter: return "trailing-delimiter";
    case MalformedReason::kLengthMismatch: return "length-mismatch";
  }
  return "unknown";
}

Segmentation ParseSegmentation(std::span<const Label> generated,
                               std::span<const Label> input) {
  std::vector<size_t> boundaries;
  size_t consumed = 0;
  bool pending_delimiter = false;
  for (size_t pos = 0; pos < generated.size(); ++pos) {
    Label l = generated[pos];
    if (l.IsDelimiter()) {
      if (consumed == 0) {
        throw NotWellformedError(MalformedReason::kLeadingDelimiter,
                                 "delimiter before the first token");
      }
      if (pending_delimiter) {
        throw NotWellformedError(MalformedReason::kDoubleDelimiter,
                                 "consecutive delimiters at output position " +
                                     std::to_string(pos));
      }
      pending_delimiter = true;
      continue;
    }
    if (consumed == input.size()) {
      throw NotWellformedError(MalformedReason::kLengthMismatch,
                               "output longer than the input");
    }
    if (l != input[consumed]) {
      throw NotWellformedError(MalformedReason::kTokenMismatch,
                               "input token " + std::to_string(consumed) +
                                   " not reproduced");
    }
    if (pending_delimiter) boundaries.push_back(consumed);
    pending_delimiter = false;
    ++consumed;
  }
  if (pending_delimiter) {
    throw NotWellformedError(MalformedReason::kTrailingDelimiter,
                             "delimiter after the last token");
  }
  if (consumed != input.size()) {
    throw NotWellformedError(MalformedReason::kLengthMismatch,
                             "output covers " + std::to_string(consumed) +
                                 " of " + std::to_string(input.size()) +
                                 " input tokens");
  }
  return Segmentation(input.size(), std::move(boundaries));
}

DelimitedText ParseDelimited(std::span<const std::string> words) {
  DelimitedText out;
  std::vector<size_t> boundaries;
  bool pending = false;
  for (size_t pos = 0; pos < words.size(); ++pos) {
    if (words[pos] == kDelimiterSymbol) {
      if (out.tokens.empty()) {
        throw NotWellformedError(MalformedReason::kLeadingDelimiter,
                                 "delimiter before the first token");
      }
      if (pending) {
        throw NotWellformedError(
            MalformedReason::kDoubleDelimiter,
            "consecutive delimiters at word " + std::to_string(pos));
      }
      pending = true;
      continue;
    }
    if (pending) boundaries.push_back(out.tokens.size());
    pending = false;
    out.tokens.push_back(words[pos]);
  }
  if (pending) {
    throw NotWellformedError(MalformedReason::kTrailingDelimiter,
                             "delimiter after the last token");
  }
  out.segmentation = Segmentation(out.tokens.size(), std::move(boundaries));
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string word;
  while (is >> word) out.push_back(word);
  return out;
}

std::vector<std::string> TokenizeDelimitedLine(std::string_view line) {
  std::vector<std::string> out;
  for (const std::string& word : SplitWhitespace(line)) {
    std::string_view rest = word;
    while (!rest.empty()) {
      size_t at = rest.find(kDelimiterSymbol);
      if (at == std::string_view::npos) {
        out.emplace_back(rest);
        break;
      }
      if (at > 0) out.emplace_back(rest.substr(0, at));
      out.emplace_back(kDelimiterSymbol);
      rest.remove_prefix(at + kDelimiterSymbol.size());
    }
  }
  return out;
}

std::string JoinTokens(std::span<const std::string> tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace segfst
