// The token scorer contract the decoder drives, plus in-process scorers.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "segfst/symbol_table.h"

namespace segfst {

/// Score given to candidates a policy rules out. Finite so that sums stay
/// comparable.
inline constexpr double kLogZeroSurrogate = -1e9;

struct ScorerContext {
  std::span<const Label> window;  // the input tokens
  std::span<const Label> prefix;  // labels generated so far, never epsilon
  const SymbolTable* symbols = nullptr;
};

/// An autoregressive scorer. ScoreNext returns one finite log-probability
/// per candidate, positionally. Scores are only ever summed and compared.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::vector<double> ScoreNext(const ScorerContext& ctx,
                                        std::span<const Label> candidates) = 0;

  /// Whether concurrent ScoreNext calls from several threads are safe.
  virtual bool IsShareable() const { return true; }
};

/// Input token the prefix would reproduce next if it were a faithful copy,
/// or kEndOfSequence once every window token has been emitted.
Label NextCopyToken(const ScorerContext& ctx);

/// Scores 0 for the next input token (end marker once the window is
/// exhausted) and kLogZeroSurrogate for everything else.
class CopyScorer : public Scorer {
 public:
  std::vector<double> ScoreNext(const ScorerContext& ctx,
                                std::span<const Label> candidates) override;
};

/// Prefers any token outside the window, then the delimiter, and only then
/// the faithful next token. Used to show that constraints rescue output.
class HallucinateScorer : public Scorer {
 public:
  std::vector<double> ScoreNext(const ScorerContext& ctx,
                                std::span<const Label> candidates) override;
};

/// Copy policy that also places a delimiter before chosen tokens.
/// Boundaries are requested either by token string or by window-local
/// position (the index of the token the delimiter precedes).
class CopyWithBoundaryScorer : public Scorer {
 public:
  CopyWithBoundaryScorer(std::set<std::string> before_tokens,
                         std::set<size_t> before_positions = {})
      : before_tokens_(std::move(before_tokens)),
        before_positions_(std::move(before_positions)) {}

  std::vector<double> ScoreNext(const ScorerContext& ctx,
                                std::span<const Label> candidates) override;

 private:
  std::set<std::string> before_tokens_;
  std::set<size_t> before_positions_;
};

/// Pseudo-random but reproducible scores in [-10, 0], a pure function of
/// (seed, window, prefix, candidate).
class RandomScorer : public Scorer {
 public:
  explicit RandomScorer(uint64_t seed) : seed_(seed) {}
  std::vector<double> ScoreNext(const ScorerContext& ctx,
                                std::span<const Label> candidates) override;

 private:
  uint64_t seed_;
};

/// Pass-through wrapper that records how the decoder calls its scorer.
class CountingScorer : public Scorer {
 public:
  explicit CountingScorer(Scorer& inner) : inner_(inner) {}
  std::vector<double> ScoreNext(const ScorerContext& ctx,
                                std::span<const Label> candidates) override;
  bool IsShareable() const override { return false; }

  size_t calls() const { return calls_; }
  size_t max_candidates() const { return max_candidates_; }

 private:
  Scorer& inner_;
  size_t calls_ = 0;
  size_t max_candidates_ = 0;
};

/// Builds the mock named "copy", "hallucinate" or "random";
/// the seed applies to the random mock. Throws kInvalidArgument otherwise.
std::unique_ptr<Scorer> MakeMockScorer(const std::string& name, uint64_t seed);

}  // namespace segfst
