// Test-only brute-force oracles and fixtures. Nothing here calls into the
// code paths these helpers are used to check.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "segfst/fst.h"
#include "segfst/scoring.h"
#include "segfst/segmentation.h"
#include "segfst/symbol_table.h"

namespace segfst::testing {

using LabelString = std::vector<Label>;

/// Every delimiter placement for `tokens`: a delimiter may precede any
/// token but the first.
inline std::set<LabelString> AllSegmentations(const LabelString& tokens) {
  std::set<LabelString> out;
  const size_t gaps = tokens.empty() ? 0 : tokens.size() - 1;
  for (uint64_t mask = 0; mask < (uint64_t{1} << gaps); ++mask) {
    LabelString s;
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0 && (mask >> (i - 1)) & 1) s.push_back(kDelimiter);
      s.push_back(tokens[i]);
    }
    out.insert(s);
  }
  return out;
}

/// Output-tape strings of an acyclic automaton by depth-first path walk,
/// epsilons dropped. `paths` receives the number of accepting paths.
inline std::set<LabelString> OutputStrings(const Automaton& a,
                                           uint64_t* paths = nullptr) {
  std::set<LabelString> out;
  uint64_t count = 0;
  if (a.start() != kNoState) {
    LabelString current;
    std::function<void(StateId, size_t)> walk = [&](StateId s, size_t depth) {
      if (depth > static_cast<size_t>(a.NumStates())) return;  // cycle guard
      if (a.IsFinal(s)) {
        out.insert(current);
        ++count;
      }
      for (const Arc& arc : a.Arcs(s)) {
        bool emits = !arc.olabel.IsEpsilon();
        if (emits) current.push_back(arc.olabel);
        walk(arc.next, depth + 1);
        if (emits) current.pop_back();
      }
    };
    walk(a.start(), 0);
  }
  if (paths) *paths = count;
  return out;
}

/// Two-row Wagner-Fischer edit distance.
template <typename T>
size_t EditDistance(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<size_t> prev(b.size() + 1);
  std::vector<size_t> cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Candidate sets a segmentation-constrained decoder faces, derived from
/// the definition rather than from any automaton: the first token alone,
/// then {next token, delimiter} after a token, the next token after a
/// delimiter, and the end marker after the last token.
inline std::vector<Label> SegmentationCandidates(const LabelString& tokens,
                                                 const LabelString& prefix) {
  size_t emitted = std::count_if(prefix.begin(), prefix.end(),
                                 [](Label l) { return !l.IsDelimiter(); });
  if (emitted == tokens.size()) return {kEndOfSequence};
  if (prefix.empty() || prefix.back().IsDelimiter()) return {tokens[emitted]};
  std::vector<Label> c{tokens[emitted], kDelimiter};
  std::sort(c.begin(), c.end());
  return c;
}

/// Total score of a complete output (end marker included), accumulated left
/// to right exactly as an incremental decoder would.
inline double ScoreOutput(Scorer& scorer, const LabelString& window,
                          const SymbolTable& symbols,
                          const LabelString& output) {
  double total = 0.0;
  LabelString prefix;
  for (size_t i = 0; i <= output.size(); ++i) {
    std::vector<Label> candidates = SegmentationCandidates(window, prefix);
    Label next = i < output.size() ? output[i] : kEndOfSequence;
    ScorerContext ctx{window, prefix, &symbols};
    std::vector<double> scores = scorer.ScoreNext(ctx, candidates);
    auto it = std::find(candidates.begin(), candidates.end(), next);
    total += scores[it - candidates.begin()];
    if (i < output.size()) prefix.push_back(next);
  }
  return total;
}

/// Synthetic transcripts: sentences of 5-30 tokens, each an opener, filler
/// words and a closer. Openers and closers also leak into sentence
/// interiors now and then, so boundaries are likely but not certain.
class SyntheticCorpus {
 public:
  explicit SyntheticCorpus(uint64_t seed, size_t fillers = 50)
      : rng_(seed), fillers_(fillers) {}

  std::vector<std::string> Sentence() {
    size_t length = Uniform(5, 30);
    std::vector<std::string> s;
    s.push_back("open" + std::to_string(Uniform(0, 11)));
    for (size_t i = 2; i < length; ++i) {
      double u = std::uniform_real_distribution<double>(0, 1)(rng_);
      if (u < 0.03) {
        s.push_back("open" + std::to_string(Uniform(0, 11)));
      } else if (u < 0.06) {
        s.push_back("close" + std::to_string(Uniform(0, 11)));
      } else {
        s.push_back("w" + std::to_string(Uniform(0, fillers_ - 1)));
      }
    }
    s.push_back("close" + std::to_string(Uniform(0, 11)));
    return s;
  }

  /// Concatenation of 5-15 sentences with its gold segmentation.
  DelimitedText Passage() {
    DelimitedText p;
    std::vector<size_t> boundaries;
    size_t count = Uniform(5, 15);
    for (size_t k = 0; k < count; ++k) {
      if (k > 0) boundaries.push_back(p.tokens.size());
      auto s = Sentence();
      p.tokens.insert(p.tokens.end(), s.begin(), s.end());
    }
    p.segmentation = Segmentation(p.tokens.size(), boundaries);
    return p;
  }

  /// A passage rendered with delimiters, for training.
  std::vector<std::string> DelimitedPassage() {
    DelimitedText p = Passage();
    return p.segmentation.Render(p.tokens);
  }

  size_t Uniform(size_t lo, size_t hi) {
    return std::uniform_int_distribution<size_t>(lo, hi)(rng_);
  }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  size_t fillers_;
};

}  // namespace segfst::testing
