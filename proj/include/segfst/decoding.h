// Greedy and beam search over a Scorer in three enforcement modes:
// free generation, finite-state constrained generation, and free
// generation repaired by Levenshtein alignment.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segfst/fst.h"
#include "segfst/scoring.h"
#include "segfst/segmentation.h"

namespace segfst {

enum class DecodeMode { kUnconstrained, kFstConstrained, kLevenshteinRepair };

const char* DecodeModeName(DecodeMode mode);
/// Accepts "none", "fst" and "repair". Throws kInvalidArgument otherwise.
DecodeMode ParseDecodeMode(const std::string& name);

struct DecodeConfig {
  int beam_size = 4;  // 1 = greedy
  DecodeMode mode = DecodeMode::kFstConstrained;
  /// Cap on generated labels in free generation; 2 * |window| + 1 when
  /// unset. Constrained search is bounded by the automaton instead.
  std::optional<size_t> max_output_len;

  /// Throws kInvalidArgument for beam_size < 1 or a cap below |window|.
  void Validate(size_t window_size) const;
};

struct SearchResult {
  std::vector<Label> labels;  // end marker excluded
  double score = 0.0;
  bool finished = false;  // ended with the end marker or in a final state
};

/// Beam search. With `constraint` set, each hypothesis carries a state of
/// that deterministic automaton and only the labels it allows are scored;
/// otherwise every candidate in `vocabulary` plus the end marker is scored.
/// Equal scores go to the lexicographically smaller label sequence. The
/// greedy path is tracked alongside the beam and never pruned, so the
/// returned score is at least the greedy score.
SearchResult BeamSearch(Scorer& scorer, std::span<const Label> window,
                        const SymbolTable& symbols,
                        const Automaton* constraint,
                        std::span<const Label> vocabulary, int beam_size,
                        size_t max_steps);

struct DecodeResult {
  SymbolTable symbols;          // per-window table
  std::vector<Label> window;    // input tokens as labels
  std::vector<Label> generated; // raw output, end marker excluded
  double score = 0.0;
  bool wellformed = false;      // raw output parsed before any repair
  std::string malformed_reason; // empty when wellformed
  std::optional<Segmentation> segmentation;

  std::vector<std::string> GeneratedText() const {
    return symbols.Decode(generated);
  }
};

/// Decodes one window. Throws kEmptyInput for an empty window and
/// propagates scorer errors.
DecodeResult DecodeWindow(Scorer& scorer, std::span<const std::string> window,
                          const DecodeConfig& cfg);

}  // namespace segfst
