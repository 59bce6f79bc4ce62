#include "segfst/fst.h"

#include <algorithm>
#include <deque>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <utility>

#include "segfst/error.h"

namespace segfst {

namespace {

bool IsEpsilonArc(const Arc& arc) {
  return arc.ilabel.IsEpsilon() && arc.olabel.IsEpsilon();
}

bool ArcLess(const Arc& x, const Arc& y) {
  return std::tie(x.ilabel, x.olabel, x.weight, x.next) <
         std::tie(y.ilabel, y.olabel, y.weight, y.next);
}

void RequireState(const Automaton& a, StateId s) {
  if (!a.IsValidState(s)) {
    throw Error(ErrorCode::kInvalidState,
                "state " + std::to_string(s) + " out of range [0, " +
                    std::to_string(a.NumStates()) + ")");
  }
}

std::vector<StateId> ReachableBfs(const Automaton& a) {
  std::vector<StateId> order;
  if (a.start() == kNoState) return order;
  std::vector<bool> seen(a.NumStates(), false);
  std::deque<StateId> queue{a.start()};
  seen[a.start()] = true;
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    order.push_back(s);
    std::vector<Arc> arcs(a.Arcs(s).begin(), a.Arcs(s).end());
    std::sort(arcs.begin(), arcs.end(), ArcLess);
    for (const Arc& arc : arcs) {
      if (!seen[arc.next]) {
        seen[arc.next] = true;
        queue.push_back(arc.next);
      }
    }
  }
  return order;
}

// Kahn's algorithm over the reachable part, FIFO ready queue fed in sorted
// arc order so that the result depends only on the automaton's structure.
std::optional<std::vector<StateId>> KahnOrder(const Automaton& a) {
  std::vector<StateId> reachable = ReachableBfs(a);
  std::vector<int> indegree(a.NumStates(), 0);
  for (StateId s : reachable) {
    for (const Arc& arc : a.Arcs(s)) ++indegree[arc.next];
  }
  std::vector<StateId> order;
  if (reachable.empty()) return order;
  if (indegree[a.start()] != 0) return std::nullopt;
  std::deque<StateId> ready{a.start()};
  while (!ready.empty()) {
    StateId s = ready.front();
    ready.pop_front();
    order.push_back(s);
    std::vector<Arc> arcs(a.Arcs(s).begin(), a.Arcs(s).end());
    std::sort(arcs.begin(), arcs.end(), ArcLess);
    for (const Arc& arc : arcs) {
      if (--indegree[arc.next] == 0) ready.push_back(arc.next);
    }
  }
  if (order.size() != reachable.size()) return std::nullopt;
  return order;
}

}  // namespace

StateId Automaton::AddState() {
  arcs_.emplace_back();
  finals_.push_back(kInfinity);
  return NumStates() - 1;
}

void Automaton::SetStart(StateId s) {
  RequireState(*this, s);
  start_ = s;
}

void Automaton::SetFinal(StateId s, Weight w) {
  RequireState(*this, s);
  finals_[s] = w;
}

void Automaton::AddArc(StateId from, const Arc& arc) {
  RequireState(*this, from);
  RequireState(*this, arc.next);
  if (IsAcceptor() && arc.ilabel != arc.olabel) {
    throw Error(ErrorCode::kInvalidArgument,
                "acceptor arc with differing input and output labels");
  }
  arcs_[from].push_back(arc);
}

std::span<const Arc> Automaton::Arcs(StateId s) const {
  RequireState(*this, s);
  return arcs_[s];
}

Weight Automaton::FinalWeight(StateId s) const {
  RequireState(*this, s);
  return finals_[s];
}

size_t Automaton::NumArcs() const {
  size_t n = 0;
  for (const auto& v : arcs_) n += v.size();
  return n;
}

Automaton BuildLinearAcceptor(std::span<const std::string> tokens,
                              SymbolTable& table) {
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyInput, "cannot build acceptor for no tokens");
  }
  std::vector<Label> labels;
  labels.reserve(tokens.size());
  for (const auto& t : tokens) {
    Label l = table.Add(t);
    if (!l.IsToken()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "reserved symbol '" + t + "' in transcript");
    }
    labels.push_back(l);
  }
  return BuildLinearAcceptor(labels);
}

Automaton BuildLinearAcceptor(std::span<const Label> labels) {
  if (labels.empty()) {
    throw Error(ErrorCode::kEmptyInput, "cannot build acceptor for no tokens");
  }
  Automaton a(FstKind::kAcceptor);
  StateId s = a.AddState();
  a.SetStart(s);
  for (Label l : labels) {
    if (l.IsEpsilon()) {
      throw Error(ErrorCode::kInvalidArgument, "epsilon in linear acceptor");
    }
    StateId next = a.AddState();
    a.AddArc(s, Arc{l, l, 0.0, next});
    s = next;
  }
  a.SetFinal(s);
  return a;
}

Automaton BuildIdentityTransducer(std::span<const Label> alphabet) {
  Automaton t(FstKind::kTransducer);
  StateId s = t.AddState();
  t.SetStart(s);
  t.SetFinal(s);
  std::set<Label> unique(alphabet.begin(), alphabet.end());
  for (Label l : unique) {
    if (l.IsEpsilon()) continue;
    t.AddArc(s, Arc{l, l, 0.0, s});
  }
  return t;
}

Automaton Compose(const Automaton& a, const Automaton& b) {
  std::set<Label> a_out;
  std::set<Label> b_in;
  bool a_out_eps = false;
  bool b_in_eps = false;
  for (StateId s = 0; s < a.NumStates(); ++s) {
    for (const Arc& arc : a.Arcs(s)) {
      if (arc.olabel.IsEpsilon()) {
        a_out_eps = true;
      } else {
        a_out.insert(arc.olabel);
      }
    }
  }
  for (StateId s = 0; s < b.NumStates(); ++s) {
    for (const Arc& arc : b.Arcs(s)) {
      if (arc.ilabel.IsEpsilon()) {
        b_in_eps = true;
      } else {
        b_in.insert(arc.ilabel);
      }
    }
  }
  for (Label l : a_out) {
    if (!b_in.contains(l)) {
      throw Error(ErrorCode::kAlphabetMismatch,
                  "label id " + std::to_string(l.id) +
                      " emitted by the left operand is not read by the right");
    }
  }
  if (a_out_eps && b_in_eps) {
    throw Error(ErrorCode::kUnsupportedEpsilon,
                "epsilon on both matched tapes needs a composition filter");
  }

  Automaton c(FstKind::kTransducer);
  if (a.start() == kNoState || b.start() == kNoState) return c;

  std::map<std::pair<StateId, StateId>, StateId> ids;
  std::deque<std::pair<StateId, StateId>> queue;
  auto state_for = [&](StateId sa, StateId sb) {
    auto [it, inserted] = ids.try_emplace({sa, sb}, kNoState);
    if (inserted) {
      it->second = c.AddState();
      queue.emplace_back(sa, sb);
    }
    return it->second;
  };
  c.SetStart(state_for(a.start(), b.start()));
  while (!queue.empty()) {
    auto [sa, sb] = queue.front();
    queue.pop_front();
    StateId from = ids.at({sa, sb});
    Weight fa = a.FinalWeight(sa);
    Weight fb = b.FinalWeight(sb);
    if (fa != kInfinity && fb != kInfinity) c.SetFinal(from, fa + fb);
    for (const Arc& x : a.Arcs(sa)) {
      if (x.olabel.IsEpsilon()) {
        StateId to = state_for(x.next, sb);
        c.AddArc(from, Arc{x.ilabel, kEpsilon, x.weight, to});
        continue;
      }
      for (const Arc& y : b.Arcs(sb)) {
        if (y.ilabel != x.olabel) continue;
        StateId to = state_for(x.next, y.next);
        c.AddArc(from, Arc{x.ilabel, y.olabel, x.weight + y.weight, to});
      }
    }
    for (const Arc& y : b.Arcs(sb)) {
      if (!y.ilabel.IsEpsilon()) continue;
      StateId to = state_for(sa, y.next);
      c.AddArc(from, Arc{kEpsilon, y.olabel, y.weight, to});
    }
  }
  return Trim(c);
}

Automaton ProjectOutput(const Automaton& t) {
  Automaton out(FstKind::kAcceptor);
  out.start_ = t.start_;
  out.finals_ = t.finals_;
  out.arcs_ = t.arcs_;
  for (auto& arcs : out.arcs_) {
    for (Arc& arc : arcs) arc.ilabel = arc.olabel;
  }
  return out;
}

Automaton RemoveEpsilon(const Automaton& a) {
  std::vector<StateId> order = TopologicalOrder(a);
  std::vector<int> position(a.NumStates(), -1);
  for (size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

  Automaton out(a.kind());
  for (StateId s = 0; s < a.NumStates(); ++s) out.AddState();
  if (a.start() == kNoState) return out;
  out.SetStart(a.start());

  std::vector<Weight> dist(a.NumStates(), kInfinity);
  for (StateId s : order) {
    std::fill(dist.begin(), dist.end(), kInfinity);
    dist[s] = 0.0;
    Weight final_weight = kInfinity;
    for (size_t i = position[s]; i < order.size(); ++i) {
      StateId q = order[i];
      if (dist[q] == kInfinity) continue;
      final_weight = std::min(final_weight, dist[q] + a.FinalWeight(q));
      for (const Arc& arc : a.Arcs(q)) {
        if (IsEpsilonArc(arc)) {
          dist[arc.next] = std::min(dist[arc.next], dist[q] + arc.weight);
        } else {
          Arc moved = arc;
          moved.weight += dist[q];
          out.AddArc(s, moved);
        }
      }
    }
    if (final_weight != kInfinity) out.SetFinal(s, final_weight);
  }
  return Trim(out);
}

Automaton DeterminizeAcyclic(const Automaton& a) {
  if (!a.IsAcceptor()) {
    throw Error(ErrorCode::kInvalidArgument, "determinize needs an acceptor");
  }
  TopologicalOrder(a);  // throws on cycles
  using Subset = std::vector<std::pair<StateId, Weight>>;

  Automaton out(FstKind::kAcceptor);
  if (a.start() == kNoState) return out;

  std::map<Subset, StateId> ids;
  std::deque<Subset> queue;
  auto state_for = [&](Subset subset) {
    auto [it, inserted] = ids.try_emplace(subset, kNoState);
    if (inserted) {
      it->second = out.AddState();
      queue.push_back(std::move(subset));
    }
    return it->second;
  };
  out.SetStart(state_for(Subset{{a.start(), 0.0}}));

  while (!queue.empty()) {
    Subset subset = std::move(queue.front());
    queue.pop_front();
    StateId from = ids.at(subset);

    Weight final_weight = kInfinity;
    std::map<Label, std::map<StateId, Weight>> moves;
    for (auto [q, residual] : subset) {
      final_weight = std::min(final_weight, residual + a.FinalWeight(q));
      for (const Arc& arc : a.Arcs(q)) {
        if (arc.ilabel.IsEpsilon()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "determinize needs an epsilon-free acceptor");
        }
        auto [it, inserted] =
            moves[arc.ilabel].try_emplace(arc.next, residual + arc.weight);
        if (!inserted) it->second = std::min(it->second, residual + arc.weight);
      }
    }
    if (final_weight != kInfinity) out.SetFinal(from, final_weight);

    for (auto& [label, targets] : moves) {
      Weight best = kInfinity;
      for (const auto& [q, w] : targets) best = std::min(best, w);
      Subset next;
      next.reserve(targets.size());
      for (const auto& [q, w] : targets) next.emplace_back(q, w - best);
      StateId to = state_for(std::move(next));
      out.AddArc(from, Arc{label, label, best, to});
    }
  }
  return Canonicalize(out);
}

Automaton Trim(const Automaton& a) {
  const StateId n = a.NumStates();
  std::vector<bool> accessible(n, false);
  for (StateId s : ReachableBfs(a)) accessible[s] = true;

  std::vector<std::vector<StateId>> reverse(n);
  for (StateId s = 0; s < n; ++s) {
    for (const Arc& arc : a.Arcs(s)) reverse[arc.next].push_back(s);
  }
  std::vector<bool> coaccessible(n, false);
  std::deque<StateId> queue;
  for (StateId s = 0; s < n; ++s) {
    if (a.IsFinal(s)) {
      coaccessible[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    for (StateId p : reverse[s]) {
      if (!coaccessible[p]) {
        coaccessible[p] = true;
        queue.push_back(p);
      }
    }
  }

  Automaton out(a.kind());
  if (a.start() == kNoState || !coaccessible[a.start()]) return out;
  std::vector<StateId> remap(n, kNoState);
  for (StateId s = 0; s < n; ++s) {
    if (accessible[s] && coaccessible[s]) remap[s] = out.AddState();
  }
  for (StateId s = 0; s < n; ++s) {
    if (remap[s] == kNoState) continue;
    if (a.IsFinal(s)) out.SetFinal(remap[s], a.FinalWeight(s));
    for (const Arc& arc : a.Arcs(s)) {
      if (remap[arc.next] == kNoState) continue;
      Arc moved = arc;
      moved.next = remap[arc.next];
      out.AddArc(remap[s], moved);
    }
  }
  out.SetStart(remap[a.start()]);
  return Canonicalize(out);
}

Automaton Canonicalize(const Automaton& a) {
  auto topo = KahnOrder(a);
  std::vector<StateId> order = topo ? *topo : ReachableBfs(a);
  std::vector<StateId> remap(a.NumStates(), kNoState);
  for (size_t i = 0; i < order.size(); ++i) remap[order[i]] = i;

  Automaton out(a.kind());
  out.arcs_.resize(order.size());
  out.finals_.assign(order.size(), kInfinity);
  if (!order.empty()) out.start_ = 0;
  for (StateId s : order) {
    StateId ns = remap[s];
    out.finals_[ns] = a.FinalWeight(s);
    for (const Arc& arc : a.Arcs(s)) {
      Arc moved = arc;
      moved.next = remap[arc.next];
      out.arcs_[ns].push_back(moved);
    }
    std::sort(out.arcs_[ns].begin(), out.arcs_[ns].end(), ArcLess);
  }
  return out;
}

std::vector<StateId> TopologicalOrder(const Automaton& a) {
  // Cycle check covers every state, not only the reachable ones.
  const StateId n = a.NumStates();
  std::vector<int> indegree(n, 0);
  for (StateId s = 0; s < n; ++s) {
    for (const Arc& arc : a.Arcs(s)) ++indegree[arc.next];
  }
  std::deque<StateId> ready;
  for (StateId s = 0; s < n; ++s) {
    if (indegree[s] == 0) ready.push_back(s);
  }
  StateId visited = 0;
  while (!ready.empty()) {
    StateId s = ready.front();
    ready.pop_front();
    ++visited;
    for (const Arc& arc : a.Arcs(s)) {
      if (--indegree[arc.next] == 0) ready.push_back(arc.next);
    }
  }
  if (visited != n) {
    throw Error(ErrorCode::kNotAcyclic, "automaton contains a cycle");
  }
  auto order = KahnOrder(a);
  return order ? *order : std::vector<StateId>{};
}

bool IsAcyclic(const Automaton& a) {
  try {
    TopologicalOrder(a);
    return true;
  } catch (const Error&) {
    return false;
  }
}

bool IsDeterministic(const Automaton& a) {
  for (StateId s = 0; s < a.NumStates(); ++s) {
    std::set<Label> seen;
    for (const Arc& arc : a.Arcs(s)) {
      if (arc.ilabel.IsEpsilon() || !seen.insert(arc.ilabel).second) {
        return false;
      }
    }
  }
  return true;
}

uint64_t CountPaths(const Automaton& a) {
  std::vector<StateId> order = TopologicalOrder(a);
  std::vector<uint64_t> paths(a.NumStates(), 0);
  if (order.empty()) return 0;
  paths[a.start()] = 1;
  uint64_t total = 0;
  for (StateId s : order) {
    if (a.IsFinal(s)) total += paths[s];
    for (const Arc& arc : a.Arcs(s)) paths[arc.next] += paths[s];
  }
  return total;
}

Weight ShortestDistance(const Automaton& a) {
  if (a.start() == kNoState) return kInfinity;
  std::vector<Weight> dist(a.NumStates(), kInfinity);
  dist[a.start()] = 0.0;
  Weight best = kInfinity;
  if (IsAcyclic(a)) {
    for (StateId s : TopologicalOrder(a)) {
      if (dist[s] == kInfinity) continue;
      best = std::min(best, dist[s] + a.FinalWeight(s));
      for (const Arc& arc : a.Arcs(s)) {
        dist[arc.next] = std::min(dist[arc.next], dist[s] + arc.weight);
      }
    }
    return best;
  }
  for (StateId s = 0; s < a.NumStates(); ++s) {
    for (const Arc& arc : a.Arcs(s)) {
      if (arc.weight < 0) {
        throw Error(ErrorCode::kNotAcyclic,
                    "negative weights on a cyclic automaton");
      }
    }
  }
  using Entry = std::pair<Weight, StateId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  heap.emplace(0.0, a.start());
  while (!heap.empty()) {
    auto [d, s] = heap.top();
    heap.pop();
    if (d > dist[s]) continue;
    best = std::min(best, d + a.FinalWeight(s));
    for (const Arc& arc : a.Arcs(s)) {
      if (d + arc.weight < dist[arc.next]) {
        dist[arc.next] = d + arc.weight;
        heap.emplace(dist[arc.next], arc.next);
      }
    }
  }
  return best;
}

std::optional<StateId> Step(const Automaton& a, StateId s, Label label) {
  for (const Arc& arc : a.Arcs(s)) {
    if (arc.ilabel == label) return arc.next;
  }
  return std::nullopt;
}

std::vector<Label> AllowedLabels(const Automaton& a, StateId s) {
  std::vector<Label> labels;
  for (const Arc& arc : a.Arcs(s)) labels.push_back(arc.ilabel);
  if (a.IsFinal(s)) labels.push_back(kEndOfSequence);
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

bool Accepts(const Automaton& a, std::span<const Label> labels) {
  if (a.start() == kNoState) return false;
  std::set<StateId> current{a.start()};
  for (Label l : labels) {
    std::set<StateId> next;
    for (StateId s : current) {
      for (const Arc& arc : a.Arcs(s)) {
        if (arc.ilabel == l) next.insert(arc.next);
      }
    }
    if (next.empty()) return false;
    current = std::move(next);
  }
  return std::any_of(current.begin(), current.end(),
                     [&](StateId s) { return a.IsFinal(s); });
}

void WriteText(const Automaton& a, std::ostream& os,
               const SymbolTable* symbols) {
  auto name = [&](Label l) -> std::string {
    if (symbols && symbols->Contains(l)) return symbols->Symbol(l);
    return std::to_string(l.id);
  };
  if (a.start() == kNoState) return;
  // Start state's arcs first, matching the usual debug convention.
  std::vector<StateId> order{a.start()};
  for (StateId s = 0; s < a.NumStates(); ++s) {
    if (s != a.start()) order.push_back(s);
  }
  for (StateId s : order) {
    for (const Arc& arc : a.Arcs(s)) {
      os << s << '\t' << arc.next << '\t' << name(arc.ilabel) << '\t'
         << name(arc.olabel) << '\t' << arc.weight << '\n';
    }
  }
  for (StateId s : order) {
    if (a.IsFinal(s)) os << s << '\t' << a.FinalWeight(s) << '\n';
  }
}

}  // namespace segfst
