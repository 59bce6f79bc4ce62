#include "segfst/decoding.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "segfst/alignment.h"
#include "segfst/constraints.h"
#include "segfst/error.h"

namespace segfst {

namespace {

struct Hypothesis {
  std::vector<Label> labels;
  double score = 0.0;
  StateId state = kNoState;
  bool finished = false;
};

bool Better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.labels < b.labels;
}

class Expander {
 public:
  Expander(Scorer& scorer, std::span<const Label> window,
           const SymbolTable& symbols, const Automaton* constraint,
           std::span<const Label> vocabulary)
      : scorer_(scorer),
        window_(window),
        symbols_(symbols),
        constraint_(constraint) {
    free_candidates_.assign(vocabulary.begin(), vocabulary.end());
    free_candidates_.push_back(kEndOfSequence);
    std::sort(free_candidates_.begin(), free_candidates_.end());
    free_candidates_.erase(
        std::unique(free_candidates_.begin(), free_candidates_.end()),
        free_candidates_.end());
  }

  std::vector<Hypothesis> Expand(const Hypothesis& h) {
    std::vector<Label> candidates =
        constraint_ ? AllowedLabels(*constraint_, h.state) : free_candidates_;
    if (candidates.empty()) {
      throw std::logic_error("constraint automaton has a dead state");
    }
    ScorerContext ctx{window_, h.labels, &symbols_};
    std::vector<double> scores = scorer_.ScoreNext(ctx, candidates);
    if (scores.size() != candidates.size()) {
      throw Error(ErrorCode::kScorerUnavailable,
                  "scorer returned " + std::to_string(scores.size()) +
                      " scores for " + std::to_string(candidates.size()) +
                      " candidates");
    }
    std::vector<Hypothesis> out;
    out.reserve(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (!std::isfinite(scores[i])) {
        throw Error(ErrorCode::kScorerUnavailable, "non-finite score");
      }
      Hypothesis next{h.labels, h.score + scores[i], h.state, false};
      if (candidates[i].IsEndOfSequence()) {
        next.finished = true;
      } else {
        next.labels.push_back(candidates[i]);
        if (constraint_) next.state = *Step(*constraint_, h.state, candidates[i]);
      }
      out.push_back(std::move(next));
    }
    return out;
  }

 private:
  Scorer& scorer_;
  std::span<const Label> window_;
  const SymbolTable& symbols_;
  const Automaton* constraint_;
  std::vector<Label> free_candidates_;
};

}  // namespace

const char* DecodeModeName(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kUnconstrained: return "none";
    case DecodeMode::kFstConstrained: return "fst";
    case DecodeMode::kLevenshteinRepair: return "repair";
  }
  return "unknown";
}

DecodeMode ParseDecodeMode(const std::string& name) {
  if (name == "none") return DecodeMode::kUnconstrained;
  if (name == "fst") return DecodeMode::kFstConstrained;
  if (name == "repair") return DecodeMode::kLevenshteinRepair;
  throw Error(ErrorCode::kInvalidArgument, "unknown decode mode '" + name + "'");
}

void DecodeConfig::Validate(size_t window_size) const {
  if (beam_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "beam size must be at least 1");
  }
  if (max_output_len && *max_output_len < window_size) {
    throw Error(ErrorCode::kInvalidArgument,
                "max output length " + std::to_string(*max_output_len) +
                    " is shorter than the window");
  }
}

SearchResult BeamSearch(Scorer& scorer, std::span<const Label> window,
                        const SymbolTable& symbols,
                        const Automaton* constraint,
                        std::span<const Label> vocabulary, int beam_size,
                        size_t max_steps) {
  if (beam_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "beam size must be at least 1");
  }
  Hypothesis initial;
  if (constraint) {
    if (constraint->start() == kNoState) {
      throw Error(ErrorCode::kInvalidArgument, "constraint accepts nothing");
    }
    initial.state = constraint->start();
  }
  Expander expander(scorer, window, symbols, constraint, vocabulary);
  std::vector<Hypothesis> beam{initial};
  Hypothesis greedy = initial;

  for (size_t step = 0; step < max_steps; ++step) {
    bool beam_done = std::all_of(beam.begin(), beam.end(),
                                 [](const Hypothesis& h) { return h.finished; });
    if (beam_done && greedy.finished) break;

    std::vector<Hypothesis> pool;
    std::optional<std::vector<Hypothesis>> greedy_expansions;
    for (const Hypothesis& h : beam) {
      if (h.finished) {
        pool.push_back(h);
        continue;
      }
      std::vector<Hypothesis> children = expander.Expand(h);
      if (!greedy.finished && !greedy_expansions && h.labels == greedy.labels) {
        greedy_expansions = children;
      }
      for (auto& c : children) pool.push_back(std::move(c));
    }
    if (!greedy.finished) {
      if (!greedy_expansions) greedy_expansions = expander.Expand(greedy);
      greedy = *std::min_element(greedy_expansions->begin(),
                                 greedy_expansions->end(), Better);
    }
    std::sort(pool.begin(), pool.end(), Better);
    if (pool.size() > static_cast<size_t>(beam_size)) pool.resize(beam_size);
    beam = std::move(pool);
  }

  beam.push_back(greedy);
  // Constrained output must end in a final state; free generation that hit
  // the length cap is returned unfinished.
  auto usable = [&](const Hypothesis& h) {
    return constraint == nullptr || h.finished;
  };
  const Hypothesis* best = nullptr;
  for (const Hypothesis& h : beam) {
    if (!usable(h)) continue;
    if (best == nullptr || (h.finished && !best->finished) ||
        (h.finished == best->finished && Better(h, *best))) {
      best = &h;
    }
  }
  if (best == nullptr) {
    throw std::logic_error("constrained search ended without a final state");
  }
  return SearchResult{best->labels, best->score, best->finished};
}

DecodeResult DecodeWindow(Scorer& scorer, std::span<const std::string> window,
                          const DecodeConfig& cfg) {
  if (window.empty()) throw Error(ErrorCode::kEmptyInput, "empty window");
  cfg.Validate(window.size());

  DecodeResult result;
  for (const std::string& token : window) {
    Label l = result.symbols.Add(token);
    if (!l.IsToken() || l.IsUnknown()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "reserved symbol '" + token + "' in window");
    }
    result.window.push_back(l);
  }

  if (cfg.mode == DecodeMode::kFstConstrained) {
    Automaton constraint = CompileWindowConstraint(result.window);
    const size_t bound = static_cast<size_t>(constraint.NumStates()) + 1;
    SearchResult found = BeamSearch(scorer, result.window, result.symbols,
                                    &constraint, {}, cfg.beam_size, bound);
    result.generated = std::move(found.labels);
    result.score = found.score;
    result.segmentation = ParseSegmentation(result.generated, result.window);
    result.wellformed = true;
    return result;
  }

  std::set<Label> distinct(result.window.begin(), result.window.end());
  std::vector<Label> vocabulary(distinct.begin(), distinct.end());
  vocabulary.push_back(kDelimiter);
  vocabulary.push_back(kUnknown);
  const size_t cap = cfg.max_output_len.value_or(2 * window.size() + 1);
  SearchResult found = BeamSearch(scorer, result.window, result.symbols,
                                  nullptr, vocabulary, cfg.beam_size, cap);
  result.generated = std::move(found.labels);
  result.score = found.score;
  try {
    result.segmentation = ParseSegmentation(result.generated, result.window);
    result.wellformed = true;
  } catch (const NotWellformedError& e) {
    result.wellformed = false;
    result.malformed_reason = MalformedReasonName(e.reason());
  }
  if (cfg.mode == DecodeMode::kLevenshteinRepair && !result.wellformed) {
    result.segmentation = RepairOutput(result.generated, result.window);
  }
  return result;
}

}  // namespace segfst
