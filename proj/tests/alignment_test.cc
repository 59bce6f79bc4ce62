#include <random>
#include <set>

#include "doctest.h"
#include "oracles.h"
#include "segfst/alignment.h"
#include "segfst/error.h"
#include "segfst/fst.h"

namespace segfst {
namespace {

using Words = std::vector<std::string>;

Words RandomWords(std::mt19937_64& rng, size_t max_len, int vocab) {
  std::uniform_int_distribution<size_t> len(0, max_len);
  std::uniform_int_distribution<int> pick(0, vocab - 1);
  Words w(len(rng));
  for (auto& t : w) t = "v" + std::to_string(pick(rng));
  return w;
}

void CheckPathInvariants(const AlignmentPath& path, size_t m, size_t k) {
  std::vector<int> src_seen(m, 0);
  std::vector<int> tgt_seen(k, 0);
  size_t last_src = 0, last_tgt = 0;
  bool any_src = false, any_tgt = false;
  size_t edits = 0;
  for (const EditOp& op : path.ops) {
    if (op.src != EditOp::kNone) {
      if (any_src) CHECK(op.src > last_src);
      last_src = op.src;
      any_src = true;
      ++src_seen[op.src];
    }
    if (op.tgt != EditOp::kNone) {
      if (any_tgt) CHECK(op.tgt > last_tgt);
      last_tgt = op.tgt;
      any_tgt = true;
      ++tgt_seen[op.tgt];
    }
    if (op.kind != EditKind::kMatch) ++edits;
  }
  for (int c : src_seen) CHECK(c == 1);
  for (int c : tgt_seen) CHECK(c == 1);
  CHECK(path.cost == edits);
}

// Edit distance as a shortest path through src o E o tgt, where E is the
// one-state edit transducer (match 0, substitute/delete/insert 1).
Weight EditDistanceByFst(const Words& src, const Words& tgt) {
  SymbolTable table;
  for (const auto& w : src) table.Add(w);
  for (const auto& w : tgt) table.Add(w);
  // Input side covers the source words, output side the target words.
  std::set<Label> in_alpha, out_alpha;
  for (const auto& w : src) in_alpha.insert(*table.Find(w));
  for (const auto& w : tgt) out_alpha.insert(*table.Find(w));
  Automaton edit(FstKind::kTransducer);
  StateId s = edit.AddState();
  edit.SetStart(s);
  edit.SetFinal(s);
  for (Label a : in_alpha) {
    edit.AddArc(s, Arc{a, kEpsilon, 1.0, s});
    for (Label b : out_alpha) edit.AddArc(s, Arc{a, b, a == b ? 0.0 : 1.0, s});
  }
  for (Label b : out_alpha) edit.AddArc(s, Arc{kEpsilon, b, 1.0, s});
  auto chain = [&](const Words& w) {
    Automaton a(FstKind::kAcceptor);
    StateId q = a.AddState();
    a.SetStart(q);
    for (const auto& t : w) {
      StateId next = a.AddState();
      Label l = *table.Find(t);
      a.AddArc(q, Arc{l, l, 0.0, next});
      q = next;
    }
    a.SetFinal(q);
    return a;
  };
  return ShortestDistance(Compose(Compose(chain(src), edit), chain(tgt)));
}

TEST_CASE("levenshtein alignment examples") {
  Words src{"the", "cat", "sat"};
  Words tgt{"the", "cats", "sat"};
  AlignmentPath p = LevenshteinAlign(src, tgt);
  CHECK(p.cost == 1);
  REQUIRE(p.ops.size() == 3);
  CHECK(p.ops[0] == EditOp{EditKind::kMatch, 0, 0});
  CHECK(p.ops[1] == EditOp{EditKind::kSubstitute, 1, 1});
  CHECK(p.ops[2] == EditOp{EditKind::kMatch, 2, 2});

  AlignmentPath same = LevenshteinAlign(src, src);
  CHECK(same.cost == 0);
  for (const auto& op : same.ops) CHECK(op.kind == EditKind::kMatch);

  Words none;
  AlignmentPath ins = LevenshteinAlign(none, Words{"a", "b"});
  CHECK(ins.cost == 2);
  REQUIRE(ins.ops.size() == 2);
  CHECK(ins.ops[0] == EditOp{EditKind::kInsert, EditOp::kNone, 0});
  CHECK(ins.ops[1] == EditOp{EditKind::kInsert, EditOp::kNone, 1});
}

TEST_CASE("alignment cost matches an independent DP and the FST route") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 2000; ++trial) {
    Words a = RandomWords(rng, 10, 4);
    Words b = RandomWords(rng, 10, 4);
    AlignmentPath p = LevenshteinAlign(a, b);
    CHECK(p.cost == testing::EditDistance(a, b));
    CheckPathInvariants(p, a.size(), b.size());
  }
  for (int trial = 0; trial < 60; ++trial) {
    Words a = RandomWords(rng, 5, 3);
    Words b = RandomWords(rng, 5, 3);
    CHECK(EditDistanceByFst(a, b) ==
          doctest::Approx(double(LevenshteinAlign(a, b).cost)));
  }
}

TEST_CASE("projection follows alignment links") {
  SUBCASE("identity alignment keeps boundaries") {
    Words w{"a", "b", "c", "d", "e"};
    Segmentation seg(5, {2, 4});
    CHECK(ProjectBoundaries(seg, LevenshteinAlign(w, w), 5) == seg);
  }
  SUBCASE("four/for example") {
    Words ref{"this", "train", "leaves", "at", "four", "the", "next", "train"};
    Words asr{"this", "train", "leaves", "at", "for", "the", "next", "train"};
    Segmentation seg(ref.size(), {5});
    Segmentation out = ProjectBoundaries(seg, LevenshteinAlign(ref, asr), asr.size());
    CHECK(out.boundaries() == std::vector<size_t>{5});
    CHECK(asr[out.boundaries()[0]] == "the");
  }
  SUBCASE("boundary before a deleted token attaches to the next match") {
    // src a b x c, tgt a b c: x is deleted, the boundary before x lands
    // before c (target index 2).
    Words src{"a", "b", "x", "c"};
    Words tgt{"a", "b", "c"};
    AlignmentPath p = LevenshteinAlign(src, tgt);
    CHECK(p.ops[2] == EditOp{EditKind::kDelete, 2, EditOp::kNone});
    CHECK(ProjectBoundaries(Segmentation(4, {2}), p, 3).boundaries() ==
          std::vector<size_t>{2});
  }
  SUBCASE("boundary with no aligned successor is dropped") {
    Words src{"a", "b", "x"};
    Words tgt{"a", "b"};
    CHECK(ProjectBoundaries(Segmentation(3, {2}), LevenshteinAlign(src, tgt), 2)
              .boundaries()
              .empty());
  }
  SUBCASE("length mismatch") {
    Words w{"a", "b"};
    CHECK_THROWS_AS(ProjectBoundaries(Segmentation(3, {1}), LevenshteinAlign(w, w), 2),
                    Error);
    CHECK_THROWS_AS(ProjectBoundaries(Segmentation(2, {1}), LevenshteinAlign(w, w), 3),
                    Error);
  }
}

TEST_CASE("repair salvages segmentations") {
  Words input{"i", "am", "hungry", "i", "am", "sleepy"};
  SUBCASE("faithful output") {
    Words gen{"i", "am", "hungry", "<SENT>", "i", "am", "sleepy"};
    CHECK(RepairOutput(gen, input) == Segmentation(6, {3}));
  }
  SUBCASE("hallucinated token after a delimiter") {
    Words gen{"i", "am", "hungry", "<SENT>", "well", "i", "am", "sleepy"};
    CHECK(RepairOutput(gen, input) == Segmentation(6, {3}));
  }
  SUBCASE("dropped token inside a segment") {
    Words gen{"i", "hungry", "<SENT>", "i", "am", "sleepy"};
    CHECK(RepairOutput(gen, input) == Segmentation(6, {3}));
  }
  SUBCASE("garbage never throws") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 3000; ++trial) {
      Words gen = RandomWords(rng, 14, 5);
      std::uniform_int_distribution<int> coin(0, 3);
      for (auto& w : gen) {
        if (coin(rng) == 0) w = "<SENT>";
      }
      Words in = RandomWords(rng, 10, 5);
      Segmentation s = RepairOutput(gen, in);
      CHECK(s.length() == in.size());
      for (size_t b : s.boundaries()) CHECK((b > 0 && b < in.size()));
    }
  }
  SUBCASE("exact inverse of delimiter insertion") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 500; ++trial) {
      Words in = RandomWords(rng, 12, 3);
      if (in.empty()) continue;
      std::vector<size_t> cuts;
      std::uniform_int_distribution<int> coin(0, 2);
      for (size_t i = 1; i < in.size(); ++i) {
        if (coin(rng) == 0) cuts.push_back(i);
      }
      Segmentation seg(in.size(), cuts);
      CHECK(RepairOutput(seg.Render(in), in) == seg);
    }
  }
}

TEST_CASE("projection is monotone") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    Words src = RandomWords(rng, 10, 3);
    Words tgt = RandomWords(rng, 10, 3);
    std::vector<size_t> cuts;
    for (size_t i = 1; i < src.size(); ++i) {
      if (rng() % 3 == 0) cuts.push_back(i);
    }
    AlignmentPath p = LevenshteinAlign(src, tgt);
    std::vector<size_t> images;
    for (size_t b : cuts) {
      Segmentation one = ProjectBoundaries(Segmentation(src.size(), {b}), p, tgt.size());
      if (!one.boundaries().empty()) images.push_back(one.boundaries()[0]);
    }
    CHECK(std::is_sorted(images.begin(), images.end()));
  }
}

}  // namespace
}  // namespace segfst
