// Add-k smoothed n-gram model over output labels, used as a desk-scale
// stand-in for a large language model.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "segfst/scoring.h"

namespace segfst {

struct NgramOptions {
  int order = 3;
  double k = 0.1;
  /// Append "</s>" to every training sequence so the model can end output.
  bool end_marker = true;
};

inline constexpr std::string_view kBeginSymbol = "<s>";

/// Counts for every context of length 0..order-1, queried over a closed
/// vocabulary V supplied at query time. Add-k smoothing applied per context
/// length, shortest first: p_L(w) = (c_L(w) + k|V| p_{L-1}(w)) / (c_L + k|V|)
/// with p_{-1} uniform, stopping at the first context never seen. With a
/// uniform prior this is plain add-k. If V holds "<unk>", continuation mass
/// outside V is pooled there; otherwise it is left out of c_L. Either way
/// each conditional sums to one.
class NgramModel {
 public:
  using ContinuationCounts = std::map<std::string, uint64_t>;

  /// Each corpus entry is a delimiter-annotated token sequence. Throws
  /// kEmptyCorpus or kInvalidArgument (order < 1, k <= 0).
  static NgramModel Train(std::span<const std::vector<std::string>> corpus,
                          const NgramOptions& options = {});

  int order() const { return options_.order; }
  double k() const { return options_.k; }
  const NgramOptions& options() const { return options_; }
  const std::map<std::string, ContinuationCounts>& counts() const {
    return counts_;
  }

  /// log p(word | history) over `vocab`. `history` is the full left context
  /// without padding; only its last order-1 items are used.
  double LogProb(std::span<const std::string> history, const std::string& word,
                 std::span<const std::string> vocab) const;
  /// LogProb for several words sharing one history and vocabulary.
  std::vector<double> LogProbs(std::span<const std::string> history,
                               std::span<const std::string> words,
                               std::span<const std::string> vocab) const;

  /// The longest suffix of `history` (padded) seen as a training context.
  std::string ContextFor(std::span<const std::string> history) const;

  /// JSON count table: {"format", "version", "order", "k", "end_marker",
  /// "counts": {context: {word: count}}}.
  void Save(std::ostream& os) const;
  static NgramModel Load(std::istream& is);

  friend bool operator==(const NgramModel& a, const NgramModel& b) {
    return a.options_.order == b.options_.order && a.options_.k == b.options_.k &&
           a.options_.end_marker == b.options_.end_marker &&
           a.counts_ == b.counts_;
  }

 private:
  NgramOptions options_;
  std::map<std::string, ContinuationCounts> counts_;
  std::map<std::string, uint64_t> totals_;
};

/// Scorer backed by an NgramModel. The closed vocabulary per window is the
/// window's tokens plus "<SENT>", "<unk>" and "</s>".
class NgramScorer : public Scorer {
 public:
  explicit NgramScorer(NgramModel model) : model_(std::move(model)) {}

  std::vector<double> ScoreNext(const ScorerContext& ctx,
                                std::span<const Label> candidates) override;

  const NgramModel& model() const { return model_; }

 private:
  NgramModel model_;
};

}  // namespace segfst
