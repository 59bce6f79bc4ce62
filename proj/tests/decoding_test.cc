#include <random>

#include "doctest.h"
#include "oracles.h"
#include "segfst/constraints.h"
#include "segfst/decoding.h"
#include "segfst/error.h"
#include "segfst/ngram.h"

namespace segfst {
namespace {

using Words = std::vector<std::string>;
using testing::LabelString;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIo;
}

MalformedReason ReasonOf(const LabelString& gen, const LabelString& in) {
  try {
    ParseSegmentation(gen, in);
  } catch (const NotWellformedError& e) {
    return e.reason();
  }
  FAIL("parsed");
  return MalformedReason::kTokenMismatch;
}

struct Scored {
  LabelString labels;
  double score = 0.0;
};

// Step-by-step argmax over the constrained candidates, smaller label on ties.
Scored GreedyOracle(Scorer& scorer, const LabelString& window,
                    const SymbolTable& symbols) {
  Scored out;
  while (true) {
    std::vector<Label> cands = testing::SegmentationCandidates(window, out.labels);
    ScorerContext ctx{window, out.labels, &symbols};
    std::vector<double> s = scorer.ScoreNext(ctx, cands);
    size_t best = 0;
    for (size_t i = 1; i < cands.size(); ++i) {
      if (s[i] > s[best] || (s[i] == s[best] && cands[i] < cands[best])) best = i;
    }
    out.score += s[best];
    if (cands[best] == kEndOfSequence) return out;
    out.labels.push_back(cands[best]);
  }
}

// Exhaustive search over every segmentation, lexicographically smaller
// output on ties.
Scored ExhaustiveOracle(Scorer& scorer, const LabelString& window,
                        const SymbolTable& symbols) {
  Scored best;
  bool first = true;
  for (const LabelString& out : testing::AllSegmentations(window)) {
    double s = testing::ScoreOutput(scorer, window, symbols, out);
    if (first || s > best.score || (s == best.score && out < best.labels)) {
      best = {out, s};
      first = false;
    }
  }
  return best;
}

Words RandomWindow(std::mt19937_64& rng, size_t n, int vocab) {
  Words w(n);
  for (auto& t : w) t = "t" + std::to_string(rng() % vocab);
  return w;
}

TEST_CASE("parse segmentation examples and failure reasons") {
  SymbolTable t;
  Words in_words{"i", "am", "hungry", "i", "am", "sleepy"};
  LabelString in = t.Encode(in_words);
  Words gen_words{"i", "am", "hungry", "<SENT>", "i", "am", "sleepy"};
  CHECK(ParseSegmentation(t.Encode(gen_words), in).boundaries() ==
        std::vector<size_t>{3});
  CHECK(ParseSegmentation(in, in).boundaries().empty());

  Label i = in[0], am = in[1];
  Label other = t.Add("zz");
  CHECK(ReasonOf({i, kDelimiter, kDelimiter, am}, {i, am}) ==
        MalformedReason::kDoubleDelimiter);
  CHECK(ReasonOf({kDelimiter, i, am}, {i, am}) == MalformedReason::kLeadingDelimiter);
  CHECK(ReasonOf({i, am, kDelimiter}, {i, am}) == MalformedReason::kTrailingDelimiter);
  CHECK(ReasonOf({i, other}, {i, am}) == MalformedReason::kTokenMismatch);
  CHECK(ReasonOf({i}, {i, am}) == MalformedReason::kLengthMismatch);
  CHECK(ReasonOf({i, am, am}, {i, am}) == MalformedReason::kLengthMismatch);
}

TEST_CASE("copy scorer reproduces the input in every mode") {
  Words window{"i", "came", "i", "saw", "i", "conquered"};
  CopyScorer copy;
  for (DecodeMode mode : {DecodeMode::kFstConstrained, DecodeMode::kUnconstrained,
                          DecodeMode::kLevenshteinRepair}) {
    for (int beam : {1, 4}) {
      DecodeConfig cfg;
      cfg.mode = mode;
      cfg.beam_size = beam;
      DecodeResult r = DecodeWindow(copy, window, cfg);
      CHECK(r.wellformed);
      CHECK(r.GeneratedText() == window);
      REQUIRE(r.segmentation);
      CHECK(r.segmentation->boundaries().empty());
      CHECK(r.score == 0.0);
    }
  }
}

TEST_CASE("constraints rescue a hallucinating scorer") {
  Words window{"i", "am", "hungry", "i", "am", "sleepy"};
  HallucinateScorer hal;
  DecodeConfig cfg;
  cfg.mode = DecodeMode::kUnconstrained;
  DecodeResult free = DecodeWindow(hal, window, cfg);
  CHECK_FALSE(free.wellformed);
  CHECK_FALSE(free.segmentation);
  CHECK_FALSE(free.malformed_reason.empty());
  CHECK(free.generated.size() <= 2 * window.size() + 1);

  cfg.mode = DecodeMode::kLevenshteinRepair;
  DecodeResult repaired = DecodeWindow(hal, window, cfg);
  CHECK_FALSE(repaired.wellformed);
  REQUIRE(repaired.segmentation);
  CHECK(repaired.segmentation->length() == window.size());

  cfg.mode = DecodeMode::kFstConstrained;
  DecodeResult fixed = DecodeWindow(hal, window, cfg);
  CHECK(fixed.wellformed);
  REQUIRE(fixed.segmentation);
  Words stripped;
  for (const auto& w : fixed.GeneratedText()) {
    if (w != "<SENT>") stripped.push_back(w);
  }
  CHECK(stripped == window);
  // Stepwise the mock prefers a delimiter to copying, so greedy search
  // puts one in every gap; wider beams find that fewer delimiters sum higher.
  cfg.beam_size = 1;
  CHECK(DecodeWindow(hal, window, cfg).segmentation->num_segments() == window.size());
  CHECK(fixed.score >= DecodeWindow(hal, window, cfg).score);
}

TEST_CASE("decode config validation") {
  CopyScorer copy;
  Words window{"a", "b"};
  DecodeConfig cfg;
  CHECK(CodeOf([&] { DecodeWindow(copy, Words{}, cfg); }) == ErrorCode::kEmptyInput);
  cfg.beam_size = 0;
  CHECK(CodeOf([&] { DecodeWindow(copy, window, cfg); }) ==
        ErrorCode::kInvalidArgument);
  cfg.beam_size = 1;
  cfg.max_output_len = 1;
  CHECK(CodeOf([&] { DecodeWindow(copy, window, cfg); }) ==
        ErrorCode::kInvalidArgument);
  cfg.max_output_len.reset();
  CHECK(CodeOf([&] { DecodeWindow(copy, Words{"a", "<SENT>"}, cfg); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(ParseDecodeMode("repair") == DecodeMode::kLevenshteinRepair);
  CHECK(std::string(DecodeModeName(DecodeMode::kUnconstrained)) == "none");
  CHECK_THROWS_AS(ParseDecodeMode("beam"), Error);
}

TEST_CASE("beam one is greedy and wider beams never score lower") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    Words window = RandomWindow(rng, 1 + rng() % 12, 5);
    RandomScorer scorer(rng());
    DecodeConfig cfg;
    cfg.beam_size = 1;
    DecodeResult greedy = DecodeWindow(scorer, window, cfg);
    Scored oracle = GreedyOracle(scorer, greedy.window, greedy.symbols);
    CHECK(greedy.generated == oracle.labels);
    CHECK(greedy.score == doctest::Approx(oracle.score).epsilon(1e-12));
    for (int beam = 2; beam <= 6; ++beam) {
      cfg.beam_size = beam;
      CHECK(DecodeWindow(scorer, window, cfg).score >= greedy.score - 1e-9);
    }
  }
}

TEST_CASE("wide beam equals exhaustive scoring under an n-gram model") {
  testing::SyntheticCorpus gen(43);
  std::vector<Words> corpus;
  for (int i = 0; i < 60; ++i) corpus.push_back(gen.DelimitedPassage());
  NgramScorer scorer(NgramModel::Train(corpus));
  std::mt19937_64 rng(44);
  for (size_t n = 1; n <= 10; ++n) {
    for (int trial = 0; trial < (n <= 8 ? 6 : 2); ++trial) {
      DelimitedText p = gen.Passage();
      size_t start = rng() % (p.tokens.size() - n);
      Words window(p.tokens.begin() + start, p.tokens.begin() + start + n);
      DecodeConfig cfg;
      cfg.beam_size = 1 << (n - 1);
      DecodeResult r = DecodeWindow(scorer, window, cfg);
      Scored best = ExhaustiveOracle(scorer, r.window, r.symbols);
      CHECK(r.generated == best.labels);
      CHECK(r.score == doctest::Approx(best.score).epsilon(1e-12));
    }
  }
}

TEST_CASE("constrained decoding asks about at most two labels per step") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 50; ++trial) {
    Words window = RandomWindow(rng, 1 + rng() % 20, 6);
    RandomScorer inner(rng());
    CountingScorer counting(inner);
    DecodeConfig cfg;
    cfg.beam_size = 1 + rng() % 4;
    DecodeWindow(counting, window, cfg);
    CHECK(counting.calls() > 0);
    CHECK(counting.max_candidates() <= 2);
  }
}

TEST_CASE("constrained output is wellformed for any scorer") {
  std::mt19937_64 rng(46);
  int wellformed = 0;
  const int trials = 1200;
  for (int trial = 0; trial < trials; ++trial) {
    Words window = RandomWindow(rng, 1 + rng() % 15, 4);
    RandomScorer scorer(rng());
    DecodeConfig cfg;
    cfg.beam_size = 1 + trial % 4;
    DecodeResult r = DecodeWindow(scorer, window, cfg);
    // Reparse independently of the decoder's own flag.
    ParseSegmentation(r.generated, r.window);
    if (r.wellformed) ++wellformed;
  }
  CHECK(wellformed == trials);
}

TEST_CASE("decoding is deterministic") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    Words window = RandomWindow(rng, 1 + rng() % 15, 3);
    uint64_t seed = rng();
    for (DecodeMode mode : {DecodeMode::kFstConstrained, DecodeMode::kUnconstrained}) {
      DecodeConfig cfg;
      cfg.mode = mode;
      RandomScorer a(seed), b(seed);
      DecodeResult x = DecodeWindow(a, window, cfg);
      DecodeResult y = DecodeWindow(b, window, cfg);
      CHECK(x.generated == y.generated);
      CHECK(x.score == y.score);
    }
  }
}

TEST_CASE("a second constraint family plugs into the same search") {
  SymbolTable table;
  Words types{"np"};
  Automaton bio = BuildBioConstraint(types, table);
  Words sentence{"the", "big", "dog", "runs"};
  LabelString window = table.Encode(sentence);
  Automaton exact = RestrictLength(bio, sentence.size());
  LabelString tags{*table.Find("B-np"), *table.Find("I-np"), *table.Find("O")};

  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 40; ++trial) {
    RandomScorer scorer(rng());
    SearchResult r = BeamSearch(scorer, window, table, &exact, {}, 81,
                                sentence.size() + 1);
    REQUIRE(r.finished);
    CHECK(r.labels.size() == sentence.size());
    CHECK(Accepts(bio, r.labels));

    // Exhaustive: every tag string, filtered by the definitional BIO rule.
    double best = -1e300;
    LabelString arg;
    for (int code = 0; code < 81; ++code) {
      LabelString seq;
      int c = code;
      for (size_t i = 0; i < sentence.size(); ++i, c /= 3) seq.push_back(tags[c % 3]);
      bool ok = true;
      for (size_t i = 0; i < seq.size(); ++i) {
        if (seq[i] == tags[1] && (i == 0 || seq[i - 1] == tags[2])) ok = false;
      }
      if (!ok) continue;
      double total = 0.0;
      LabelString prefix;
      for (size_t i = 0; i <= seq.size(); ++i) {
        Label next = i < seq.size() ? seq[i] : kEndOfSequence;
        ScorerContext ctx{window, prefix, &table};
        total += scorer.ScoreNext(ctx, std::span<const Label>(&next, 1))[0];
        if (i < seq.size()) prefix.push_back(next);
      }
      if (total > best || (total == best && seq < arg)) {
        best = total;
        arg = seq;
      }
    }
    CHECK(r.labels == arg);
    CHECK(r.score == doctest::Approx(best).epsilon(1e-12));
  }
}

}  // namespace
}  // namespace segfst
