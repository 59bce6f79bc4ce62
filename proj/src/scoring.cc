#include "segfst/scoring.h"

#include <algorithm>

#include "segfst/error.h"

namespace segfst {

namespace {

// splitmix64 finalizer.
uint64_t Mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

size_t TokensEmitted(std::span<const Label> prefix) {
  return std::count_if(prefix.begin(), prefix.end(),
                       [](Label l) { return !l.IsDelimiter(); });
}

}  // namespace

Label NextCopyToken(const ScorerContext& ctx) {
  size_t emitted = TokensEmitted(ctx.prefix);
  return emitted < ctx.window.size() ? ctx.window[emitted] : kEndOfSequence;
}

std::vector<double> CopyScorer::ScoreNext(const ScorerContext& ctx,
                                          std::span<const Label> candidates) {
  Label expected = NextCopyToken(ctx);
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (Label c : candidates) {
    scores.push_back(c == expected ? 0.0 : kLogZeroSurrogate);
  }
  return scores;
}

std::vector<double> HallucinateScorer::ScoreNext(
    const ScorerContext& ctx, std::span<const Label> candidates) {
  Label expected = NextCopyToken(ctx);
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (Label c : candidates) {
    bool in_window =
        std::find(ctx.window.begin(), ctx.window.end(), c) != ctx.window.end();
    if (c.IsToken() && !in_window) {
      scores.push_back(0.0);
    } else if (c.IsDelimiter()) {
      scores.push_back(-1.0);
    } else if (c == expected) {
      scores.push_back(-2.0);
    } else {
      scores.push_back(kLogZeroSurrogate);
    }
  }
  return scores;
}

std::vector<double> CopyWithBoundaryScorer::ScoreNext(
    const ScorerContext& ctx, std::span<const Label> candidates) {
  Label expected = NextCopyToken(ctx);
  size_t position = TokensEmitted(ctx.prefix);
  bool after_delimiter = !ctx.prefix.empty() && ctx.prefix.back().IsDelimiter();
  bool want_boundary = false;
  if (position > 0 && !after_delimiter && !expected.IsEndOfSequence()) {
    want_boundary = before_positions_.contains(position);
    if (!want_boundary && ctx.symbols != nullptr) {
      want_boundary = before_tokens_.contains(ctx.symbols->Symbol(expected));
    }
  }
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (Label c : candidates) {
    if (c.IsDelimiter()) {
      scores.push_back(want_boundary ? 0.0 : -5.0);
    } else if (c == expected) {
      scores.push_back(want_boundary ? -5.0 : 0.0);
    } else {
      scores.push_back(kLogZeroSurrogate);
    }
  }
  return scores;
}

std::vector<double> RandomScorer::ScoreNext(const ScorerContext& ctx,
                                            std::span<const Label> candidates) {
  uint64_t h = Mix(seed_);
  for (Label l : ctx.window) h = Mix(h ^ static_cast<uint64_t>(l.id));
  h = Mix(h ^ 0xffff);
  for (Label l : ctx.prefix) h = Mix(h ^ static_cast<uint64_t>(l.id));
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (Label c : candidates) {
    uint64_t v = Mix(h ^ (static_cast<uint64_t>(c.id) << 32));
    scores.push_back(-10.0 * static_cast<double>(v >> 11) * 0x1.0p-53);
  }
  return scores;
}

std::vector<double> CountingScorer::ScoreNext(
    const ScorerContext& ctx, std::span<const Label> candidates) {
  ++calls_;
  max_candidates_ = std::max(max_candidates_, candidates.size());
  return inner_.ScoreNext(ctx, candidates);
}

std::unique_ptr<Scorer> MakeMockScorer(const std::string& name, uint64_t seed) {
  if (name == "copy") return std::make_unique<CopyScorer>();
  if (name == "hallucinate") return std::make_unique<HallucinateScorer>();
  if (name == "random") return std::make_unique<RandomScorer>(seed);
  throw Error(ErrorCode::kInvalidArgument, "unknown mock scorer '" + name + "'");
}

}  // namespace segfst
