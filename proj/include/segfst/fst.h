// Weighted finite-state acceptors and transducers over the tropical
// (min, +) semiring, and the handful of algorithms the segmenter needs.
//
// Composition handles epsilon on the matched tape of one operand only;
// the three-way epsilon filter of general composition is not implemented.
// Epsilon removal, determinization and path counting require acyclic
// input. Outputs of Compose, RemoveEpsilon and DeterminizeAcyclic are
// trimmed and, when acyclic, numbered in canonical topological order.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "segfst/symbol_table.h"

namespace segfst {

using StateId = int32_t;
using Weight = double;

inline constexpr StateId kNoState = -1;
inline constexpr Weight kInfinity = std::numeric_limits<Weight>::infinity();

enum class FstKind { kAcceptor, kTransducer };

struct Arc {
  Label ilabel;
  Label olabel;
  Weight weight = 0.0;
  StateId next = kNoState;

  friend bool operator==(const Arc&, const Arc&) = default;
};

class Automaton {
 public:
  explicit Automaton(FstKind kind = FstKind::kAcceptor) : kind_(kind) {}

  FstKind kind() const { return kind_; }
  bool IsAcceptor() const { return kind_ == FstKind::kAcceptor; }

  StateId AddState();
  void SetStart(StateId s);
  void SetFinal(StateId s, Weight w = 0.0);
  /// Throws kInvalidState for unknown endpoints and kInvalidArgument when
  /// an acceptor arc has differing tapes.
  void AddArc(StateId from, const Arc& arc);

  StateId start() const { return start_; }
  StateId NumStates() const { return static_cast<StateId>(arcs_.size()); }
  bool IsValidState(StateId s) const { return s >= 0 && s < NumStates(); }
  std::span<const Arc> Arcs(StateId s) const;
  bool IsFinal(StateId s) const { return FinalWeight(s) != kInfinity; }
  Weight FinalWeight(StateId s) const;
  size_t NumArcs() const;

  friend bool operator==(const Automaton&, const Automaton&) = default;

 private:
  friend Automaton ProjectOutput(const Automaton&);
  friend Automaton Canonicalize(const Automaton&);

  FstKind kind_;
  StateId start_ = kNoState;
  std::vector<std::vector<Arc>> arcs_;
  std::vector<Weight> finals_;
};

/// Chain acceptor over `tokens`, inserting unseen tokens into `table`.
/// Throws kEmptyInput for an empty sequence.
Automaton BuildLinearAcceptor(std::span<const std::string> tokens,
                              SymbolTable& table);
Automaton BuildLinearAcceptor(std::span<const Label> labels);

/// One-state transducer mapping every label in `alphabet` to itself.
Automaton BuildIdentityTransducer(std::span<const Label> alphabet);

/// Composition of `a` (output tape) with `b` (input tape). Throws
/// kAlphabetMismatch when `a` emits a label `b` never reads, and
/// kUnsupportedEpsilon when both matched tapes carry epsilon.
Automaton Compose(const Automaton& a, const Automaton& b);

/// Acceptor over the output tape of `t`.
Automaton ProjectOutput(const Automaton& t);

Automaton RemoveEpsilon(const Automaton& a);

/// Weighted subset construction for acyclic, epsilon-free acceptors.
Automaton DeterminizeAcyclic(const Automaton& a);

/// Removes states that are unreachable from start or cannot reach a final.
Automaton Trim(const Automaton& a);

/// Renumbers states in topological order from the start state, with arcs
/// sorted by (ilabel, olabel, weight). Unreachable states are dropped.
Automaton Canonicalize(const Automaton& a);

/// Topological order of the states reachable from start; kNotAcyclic on a
/// cycle.
std::vector<StateId> TopologicalOrder(const Automaton& a);
bool IsAcyclic(const Automaton& a);
bool IsDeterministic(const Automaton& a);

/// Number of distinct accepting paths of an acyclic automaton.
uint64_t CountPaths(const Automaton& a);

/// Minimum path weight from start to a final state, kInfinity when none.
Weight ShortestDistance(const Automaton& a);

/// Successor of `s` on input `label` in a deterministic automaton.
std::optional<StateId> Step(const Automaton& a, StateId s, Label label);

/// Sorted labels with an outgoing arc from `s`, plus kEndOfSequence iff `s`
/// is final.
std::vector<Label> AllowedLabels(const Automaton& a, StateId s);

/// True iff the acceptor accepts `labels` (epsilon-free input assumed).
bool Accepts(const Automaton& a, std::span<const Label> labels);

/// Text dump: "src dst ilabel olabel weight" per arc, then "state weight"
/// per final state. Labels print as symbols when a table is given.
void WriteText(const Automaton& a, std::ostream& os,
               const SymbolTable* symbols = nullptr);

}  // namespace segfst
