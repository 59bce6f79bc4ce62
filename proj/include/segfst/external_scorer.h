// Scorer living in a child process, spoken to with newline-delimited JSON
// over the child's standard streams.
//
//   request:  {"id": 7, "window": [...], "prefix": [...], "candidates": [...]}
//   response: {"id": 7, "logprobs": [...]}
//
// The delimiter travels as "<SENT>", the end marker as "</s>". One request
// is in flight at a time.

#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <sys/types.h>

#include "segfst/scoring.h"

namespace segfst {

class ExternalScorer : public Scorer {
 public:
  /// Starts `command` through /bin/sh. Throws kScorerUnavailable when the
  /// process cannot be started.
  explicit ExternalScorer(
      std::string command,
      std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~ExternalScorer() override;

  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  /// Throws kScorerUnavailable on timeout, I/O failure, a malformed
  /// response, a mismatched id, a wrong number of scores or a non-finite
  /// score.
  std::vector<double> ScoreNext(const ScorerContext& ctx,
                                std::span<const Label> candidates) override;
  bool IsShareable() const override { return false; }

 private:
  std::string ReadLine();
  void Shutdown();

  std::string command_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  int64_t next_id_ = 0;
  std::string buffer_;
};

/// Request/response builders shared by both ends of the protocol.
std::string EncodeScoreRequest(int64_t id, const ScorerContext& ctx,
                               std::span<const Label> candidates);
std::vector<double> DecodeScoreResponse(const std::string& line,
                                        int64_t expected_id,
                                        size_t expected_count);

/// Answers requests from `in` with `scorer` until end of input. Each
/// request gets its own symbol table. Returns the number served.
size_t ServeScorer(Scorer& scorer, std::istream& in, std::ostream& out);

}  // namespace segfst
