#include "segfst/constraints.h"

#include <set>

#include "segfst/error.h"

namespace segfst {

void ConstraintSpec::Validate() const {
  if (family == ConstraintFamily::kBioTagging && bio_labels.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "BIO constraint needs at least one chunk type");
  }
}

Automaton BuildSegmentationTransducer(const SymbolTable& table) {
  // 0: nothing read yet; 1: after a token (final); 2: delimiter emitted.
  Automaton t(FstKind::kTransducer);
  StateId fresh = t.AddState();
  StateId after_token = t.AddState();
  StateId after_delim = t.AddState();
  t.SetStart(fresh);
  t.SetFinal(after_token);
  for (Label l : table.TokenLabels()) {
    t.AddArc(fresh, Arc{l, l, 0.0, after_token});
    t.AddArc(after_token, Arc{l, l, 0.0, after_token});
    t.AddArc(after_delim, Arc{l, l, 0.0, after_token});
  }
  t.AddArc(after_token, Arc{kEpsilon, kDelimiter, 0.0, after_delim});
  return t;
}

Automaton CompileWindowConstraint(std::span<const std::string> tokens,
                                  SymbolTable& table) {
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyInput, "empty window");
  }
  std::vector<Label> labels;
  labels.reserve(tokens.size());
  for (const auto& t : tokens) labels.push_back(table.Add(t));
  return CompileWindowConstraint(labels);
}

Automaton CompileWindowConstraint(std::span<const Label> tokens) {
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyInput, "empty window");
  }
  const auto n = static_cast<StateId>(tokens.size());
  // State layout: 0 start; 1..n after token i; n+1..2n-1 after the
  // delimiter following token i (numbered n+i).
  Automaton a(FstKind::kAcceptor);
  for (StateId s = 0; s < 2 * n; ++s) a.AddState();
  a.SetStart(0);
  a.SetFinal(n);
  for (StateId i = 0; i < n; ++i) {
    Label l = tokens[i];
    if (!l.IsToken()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "reserved label in window at position " + std::to_string(i));
    }
    a.AddArc(i, Arc{l, l, 0.0, i + 1});
    if (i > 0) a.AddArc(n + i, Arc{l, l, 0.0, i + 1});
    if (i + 1 < n) a.AddArc(i + 1, Arc{kDelimiter, kDelimiter, 0.0, n + i + 1});
  }
  return Canonicalize(a);
}

Automaton CompileWindowConstraintByComposition(
    std::span<const std::string> tokens, SymbolTable& table) {
  Automaton x = BuildLinearAcceptor(tokens, table);
  Automaton t = BuildSegmentationTransducer(table);
  return DeterminizeAcyclic(RemoveEpsilon(ProjectOutput(Compose(x, t))));
}

Automaton BuildBioConstraint(std::span<const std::string> chunk_types,
                             SymbolTable& table) {
  ConstraintSpec spec{ConstraintFamily::kBioTagging,
                      {chunk_types.begin(), chunk_types.end()}};
  spec.Validate();
  std::set<std::string> unique(chunk_types.begin(), chunk_types.end());

  // 0: outside (also the start); one "inside" state per chunk type.
  Automaton a(FstKind::kAcceptor);
  StateId outside = a.AddState();
  a.SetStart(outside);
  a.SetFinal(outside);
  std::vector<std::pair<Label, Label>> tags;  // (B-x, I-x)
  std::vector<StateId> inside;
  for (const auto& type : unique) {
    tags.emplace_back(table.Add("B-" + type), table.Add("I-" + type));
    StateId s = a.AddState();
    a.SetFinal(s);
    inside.push_back(s);
  }
  Label o = table.Add("O");
  std::vector<StateId> all{outside};
  all.insert(all.end(), inside.begin(), inside.end());
  for (StateId from : all) {
    a.AddArc(from, Arc{o, o, 0.0, outside});
    for (size_t k = 0; k < tags.size(); ++k) {
      a.AddArc(from, Arc{tags[k].first, tags[k].first, 0.0, inside[k]});
    }
  }
  for (size_t k = 0; k < tags.size(); ++k) {
    a.AddArc(inside[k], Arc{tags[k].second, tags[k].second, 0.0, inside[k]});
  }
  return a;
}

Automaton RestrictLength(const Automaton& constraint, size_t length) {
  std::set<Label> alphabet;
  for (StateId s = 0; s < constraint.NumStates(); ++s) {
    for (const Arc& arc : constraint.Arcs(s)) alphabet.insert(arc.olabel);
  }
  alphabet.erase(kEpsilon);
  Automaton counter(FstKind::kAcceptor);
  for (size_t i = 0; i <= length; ++i) counter.AddState();
  counter.SetStart(0);
  counter.SetFinal(static_cast<StateId>(length));
  for (size_t i = 0; i < length; ++i) {
    for (Label l : alphabet) {
      counter.AddArc(i, Arc{l, l, 0.0, static_cast<StateId>(i + 1)});
    }
  }
  return DeterminizeAcyclic(
      RemoveEpsilon(ProjectOutput(Compose(counter, constraint))));
}

}  // namespace segfst
