// Output-space constraints for constrained decoding.
//
// The segmentation family maps a token sequence onto itself with an
// optional delimiter before every token except the first, so an n-token
// window admits 2^(n-1) outputs. The BIO family shows that any regular
// language over output labels plugs into the same decoder.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "segfst/fst.h"
#include "segfst/symbol_table.h"

namespace segfst {

enum class ConstraintFamily { kSegmentation, kBioTagging };

struct ConstraintSpec {
  ConstraintFamily family = ConstraintFamily::kSegmentation;
  std::vector<std::string> bio_labels;  // chunk types, e.g. {"NP", "VP"}

  /// Throws kInvalidArgument when BIO tagging has no chunk types.
  void Validate() const;
};

/// Transducer over every token label of `table`: identity on tokens, with
/// an epsilon:<SENT> arc available between consecutive tokens.
Automaton BuildSegmentationTransducer(const SymbolTable& table);

/// Deterministic acceptor of all delimiter placements for `tokens`, built
/// directly as a 2n-state sawtooth. Inserts unseen tokens into `table`.
Automaton CompileWindowConstraint(std::span<const std::string> tokens,
                                  SymbolTable& table);
Automaton CompileWindowConstraint(std::span<const Label> tokens);

/// Same language, obtained by composing the linear acceptor with the
/// segmentation transducer, projecting, removing epsilons and determinizing.
Automaton CompileWindowConstraintByComposition(
    std::span<const std::string> tokens, SymbolTable& table);

/// Acceptor over {B-x, I-x, O} for each chunk type x that rejects I-x
/// unless it follows B-x or I-x. Every state is final.
Automaton BuildBioConstraint(std::span<const std::string> chunk_types,
                             SymbolTable& table);

/// Intersection of a (possibly cyclic) tag acceptor with all strings of
/// exactly `length` labels over its alphabet.
Automaton RestrictLength(const Automaton& constraint, size_t length);

}  // namespace segfst
