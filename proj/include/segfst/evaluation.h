// Segmentation quality metrics and reference segmentation policies.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "segfst/segmentation.h"

namespace segfst {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Matched/predicted/reference counts; pooled across passages for the
/// corpus-level (micro-averaged) score.
struct PrfCounts {
  size_t matched = 0;
  size_t predicted = 0;
  size_t reference = 0;

  PrfCounts& operator+=(const PrfCounts& o) {
    matched += o.matched;
    predicted += o.predicted;
    reference += o.reference;
    return *this;
  }
  /// Empty prediction and empty reference score 1; otherwise an empty side
  /// scores 0. F1 is 0 unless precision and recall are both positive.
  Prf Score() const;
};

enum class MatchUnit {
  kBoundary,  // internal boundary positions
  kSegment,   // exact (begin, end) spans
};

/// Throws kLengthMismatch when the segmentations cover different lengths.
PrfCounts CountMatches(const Segmentation& pred, const Segmentation& gold,
                       MatchUnit unit = MatchUnit::kBoundary);
Prf BoundaryPrf(const Segmentation& pred, const Segmentation& gold);

/// Pooled counts over all passages.
Prf MicroPrf(std::span<const Segmentation> pred,
             std::span<const Segmentation> gold,
             MatchUnit unit = MatchUnit::kBoundary);
/// Mean of per-passage scores, reported for comparison only.
Prf MacroPrf(std::span<const Segmentation> pred,
             std::span<const Segmentation> gold,
             MatchUnit unit = MatchUnit::kBoundary);

/// Boundaries every `segment_length` tokens. Throws kInvalidArgument for a
/// zero length.
Segmentation FixedLengthSegment(size_t n, size_t segment_length);

struct OracleOptions {
  /// Tokens (compared lowercased, punctuation kept) that never end a
  /// sentence, e.g. "st." or "dr.". Empty by default.
  std::set<std::string> abbreviations;
};

/// Sentence boundaries of a punctuated reference: after every token ending
/// in '.', '!' or '?'. Tokens are lowercased and stripped of punctuation
/// other than apostrophes; tokens left empty are dropped.
DelimitedText ReferenceSegmentation(std::span<const std::string> reference,
                                    const OracleOptions& options = {});

/// Reference boundaries projected onto an ASR transcript through a
/// Levenshtein alignment of the normalized reference with `asr`.
Segmentation OracleSegment(std::span<const std::string> reference,
                           std::span<const std::string> asr,
                           const OracleOptions& options = {});

/// Lowercases ASCII and removes punctuation except apostrophes.
std::string NormalizeToken(const std::string& token);

/// Segment-length counts in bins [0, w), [w, 2w), ... with a final
/// open-ended bin starting at `overflow_from`.
class LengthHistogram {
 public:
  explicit LengthHistogram(size_t bin_width = 10, size_t overflow_from = 50);

  void Add(const Segmentation& seg);
  void AddLength(size_t length);

  size_t num_bins() const { return counts_.size(); }
  const std::vector<size_t>& counts() const { return counts_; }
  size_t total() const;
  /// "0-9", "10-19", ..., "50+".
  std::string BinLabel(size_t bin) const;
  size_t BinOf(size_t length) const;

  /// "bin,count" lines after a header.
  void WriteCsv(std::ostream& os) const;

 private:
  size_t bin_width_;
  size_t overflow_from_;
  std::vector<size_t> counts_;
};

/// Fraction of raw outputs that parsed as well-formed; 1 for no outputs.
double WellformedRate(std::span<const bool> wellformed);

struct PassageReport {
  std::string id;
  size_t tokens = 0;
  PrfCounts counts;
  Prf prf;
};

struct EvalReport {
  double wellformed_rate = 1.0;
  MatchUnit unit = MatchUnit::kBoundary;
  PrfCounts counts;
  Prf micro;
  Prf macro;
  LengthHistogram predicted_lengths;
  LengthHistogram reference_lengths;
  std::vector<PassageReport> passages;

  /// JSON with a fixed key order.
  std::string ToJson() const;
  /// "passage,tokens,matched,predicted,reference,precision,recall,f1".
  void WritePassageCsv(std::ostream& os) const;
};

/// Full corpus report. `wellformed` may be empty (rate then 1).
EvalReport Evaluate(std::span<const Segmentation> pred,
                    std::span<const Segmentation> gold,
                    std::span<const bool> wellformed = {},
                    MatchUnit unit = MatchUnit::kBoundary);

}  // namespace segfst
