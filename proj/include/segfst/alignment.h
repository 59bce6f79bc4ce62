// Levenshtein alignment between token sequences and projection of segment
// boundaries across alignment links.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "segfst/segmentation.h"
#include "segfst/symbol_table.h"

namespace segfst {

enum class EditKind { kMatch, kSubstitute, kDelete, kInsert };

/// One alignment link. Delete consumes a source token only (tgt = kNone),
/// Insert a target token only (src = kNone).
struct EditOp {
  static constexpr size_t kNone = static_cast<size_t>(-1);

  EditKind kind;
  size_t src = kNone;
  size_t tgt = kNone;

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct AlignmentPath {
  std::vector<EditOp> ops;
  size_t cost = 0;
  size_t src_length = 0;
  size_t tgt_length = 0;
};

/// Unit-cost minimum edit alignment. Among equal-cost paths the backtrace,
/// which runs from the end of both sequences, takes Match, then Substitute,
/// then Delete, then Insert.
AlignmentPath LevenshteinAlign(std::span<const std::string> src,
                               std::span<const std::string> tgt);
AlignmentPath LevenshteinAlign(std::span<const Label> src,
                               std::span<const Label> tgt);

/// Moves boundaries over the source onto the target. A boundary before a
/// deleted source token attaches to the next aligned source token; one with
/// no aligned successor, or landing on target position 0, is dropped.
/// Throws kLengthMismatch when the inputs disagree on lengths.
Segmentation ProjectBoundaries(const Segmentation& src_boundaries,
                               const AlignmentPath& path, size_t tgt_length);

/// Salvages a segmentation of `input` from free-form generated output:
/// delimiters are stripped, the remainder aligned to `input` and delimiter
/// positions projected. Never throws for any generated sequence.
Segmentation RepairOutput(std::span<const std::string> generated,
                          std::span<const std::string> input);
Segmentation RepairOutput(std::span<const Label> generated,
                          std::span<const Label> input);

}  // namespace segfst
