#include "segfst/evaluation.h"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <utility>

#include "json.hpp"

#include "segfst/alignment.h"
#include "segfst/error.h"

namespace segfst {

namespace {

void RequireSameLength(const Segmentation& pred, const Segmentation& gold) {
  if (pred.length() != gold.length()) {
    throw Error(ErrorCode::kLengthMismatch,
                "prediction covers " + std::to_string(pred.length()) +
                    " tokens, reference " + std::to_string(gold.length()));
  }
}

void RequireSameCount(size_t pred, size_t gold) {
  if (pred != gold) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(pred) + " predicted passages for " +
                    std::to_string(gold) + " reference passages");
  }
}

std::vector<std::pair<size_t, size_t>> Spans(const Segmentation& seg) {
  std::vector<std::pair<size_t, size_t>> spans;
  size_t begin = 0;
  for (size_t b : seg.boundaries()) {
    spans.emplace_back(begin, b);
    begin = b;
  }
  if (seg.length() > 0) spans.emplace_back(begin, seg.length());
  return spans;
}

bool EndsSentence(const std::string& token) {
  size_t end = token.size();
  while (end > 0 && (token[end - 1] == '"' || token[end - 1] == '\'' ||
                     token[end - 1] == ')' || token[end - 1] == ']')) {
    --end;
  }
  if (end == 0) return false;
  char c = token[end - 1];
  return c == '.' || c == '!' || c == '?';
}

std::string Lowercase(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

nlohmann::ordered_json PrfJson(const Prf& prf) {
  nlohmann::ordered_json j;
  j["precision"] = prf.precision;
  j["recall"] = prf.recall;
  j["f1"] = prf.f1;
  return j;
}

}  // namespace

Prf PrfCounts::Score() const {
  if (predicted == 0 && reference == 0) return {1.0, 1.0, 1.0};
  Prf out;
  out.precision =
      predicted == 0 ? 0.0 : static_cast<double>(matched) / predicted;
  out.recall = reference == 0 ? 0.0 : static_cast<double>(matched) / reference;
  if (out.precision > 0.0 && out.recall > 0.0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

PrfCounts CountMatches(const Segmentation& pred, const Segmentation& gold,
                       MatchUnit unit) {
  RequireSameLength(pred, gold);
  PrfCounts counts;
  if (unit == MatchUnit::kBoundary) {
    const auto& p = pred.boundaries();
    const auto& g = gold.boundaries();
    std::vector<size_t> common;
    std::set_intersection(p.begin(), p.end(), g.begin(), g.end(),
                          std::back_inserter(common));
    counts.matched = common.size();
    counts.predicted = p.size();
    counts.reference = g.size();
  } else {
    auto p = Spans(pred);
    auto g = Spans(gold);
    std::vector<std::pair<size_t, size_t>> common;
    std::set_intersection(p.begin(), p.end(), g.begin(), g.end(),
                          std::back_inserter(common));
    counts.matched = common.size();
    counts.predicted = p.size();
    counts.reference = g.size();
  }
  return counts;
}

Prf BoundaryPrf(const Segmentation& pred, const Segmentation& gold) {
  return CountMatches(pred, gold, MatchUnit::kBoundary).Score();
}

Prf MicroPrf(std::span<const Segmentation> pred,
             std::span<const Segmentation> gold, MatchUnit unit) {
  RequireSameCount(pred.size(), gold.size());
  PrfCounts pooled;
  for (size_t i = 0; i < pred.size(); ++i) {
    pooled += CountMatches(pred[i], gold[i], unit);
  }
  return pooled.Score();
}

Prf MacroPrf(std::span<const Segmentation> pred,
             std::span<const Segmentation> gold, MatchUnit unit) {
  RequireSameCount(pred.size(), gold.size());
  Prf mean;
  if (pred.empty()) return {1.0, 1.0, 1.0};
  for (size_t i = 0; i < pred.size(); ++i) {
    Prf one = CountMatches(pred[i], gold[i], unit).Score();
    mean.precision += one.precision;
    mean.recall += one.recall;
    mean.f1 += one.f1;
  }
  const double n = static_cast<double>(pred.size());
  return {mean.precision / n, mean.recall / n, mean.f1 / n};
}

Segmentation FixedLengthSegment(size_t n, size_t segment_length) {
  if (segment_length == 0) {
    throw Error(ErrorCode::kInvalidArgument, "segment length must be >= 1");
  }
  std::vector<size_t> boundaries;
  for (size_t b = segment_length; b < n; b += segment_length) {
    boundaries.push_back(b);
  }
  return Segmentation(n, std::move(boundaries));
}

std::string NormalizeToken(const std::string& token) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    auto u = static_cast<unsigned char>(c);
    if (std::ispunct(u) && c != '\'') continue;
    out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

DelimitedText ReferenceSegmentation(std::span<const std::string> reference,
                                    const OracleOptions& options) {
  DelimitedText out;
  std::vector<size_t> boundaries;
  for (const std::string& raw : reference) {
    std::string token = NormalizeToken(raw);
    if (!token.empty()) out.tokens.push_back(std::move(token));
    if (out.tokens.empty()) continue;
    if (EndsSentence(raw) && !options.abbreviations.contains(Lowercase(raw))) {
      boundaries.push_back(out.tokens.size());
    }
  }
  const size_t n = out.tokens.size();
  std::erase_if(boundaries, [n](size_t b) { return b == 0 || b >= n; });
  out.segmentation = Segmentation(n, std::move(boundaries));
  return out;
}

Segmentation OracleSegment(std::span<const std::string> reference,
                           std::span<const std::string> asr,
                           const OracleOptions& options) {
  DelimitedText ref = ReferenceSegmentation(reference, options);
  AlignmentPath path = LevenshteinAlign(ref.tokens, asr);
  return ProjectBoundaries(ref.segmentation, path, asr.size());
}

LengthHistogram::LengthHistogram(size_t bin_width, size_t overflow_from)
    : bin_width_(bin_width), overflow_from_(overflow_from) {
  if (bin_width_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "histogram bin width must be > 0");
  }
  size_t regular = (overflow_from_ + bin_width_ - 1) / bin_width_;
  counts_.assign(regular + 1, 0);
}

size_t LengthHistogram::BinOf(size_t length) const {
  if (length >= overflow_from_) return counts_.size() - 1;
  return std::min(length / bin_width_, counts_.size() - 2);
}

void LengthHistogram::AddLength(size_t length) { ++counts_[BinOf(length)]; }

void LengthHistogram::Add(const Segmentation& seg) {
  for (size_t len : seg.SegmentLengths()) AddLength(len);
}

size_t LengthHistogram::total() const {
  size_t t = 0;
  for (size_t c : counts_) t += c;
  return t;
}

std::string LengthHistogram::BinLabel(size_t bin) const {
  if (bin + 1 == counts_.size()) return std::to_string(overflow_from_) + "+";
  size_t lo = bin * bin_width_;
  size_t hi = std::min(lo + bin_width_, overflow_from_) - 1;
  return std::to_string(lo) + "-" + std::to_string(hi);
}

void LengthHistogram::WriteCsv(std::ostream& os) const {
  os << "bin,count\n";
  for (size_t b = 0; b < counts_.size(); ++b) {
    os << BinLabel(b) << ',' << counts_[b] << '\n';
  }
}

double WellformedRate(std::span<const bool> wellformed) {
  if (wellformed.empty()) return 1.0;
  size_t ok = std::count(wellformed.begin(), wellformed.end(), true);
  return static_cast<double>(ok) / static_cast<double>(wellformed.size());
}

EvalReport Evaluate(std::span<const Segmentation> pred,
                    std::span<const Segmentation> gold,
                    std::span<const bool> wellformed, MatchUnit unit) {
  RequireSameCount(pred.size(), gold.size());
  EvalReport report;
  report.unit = unit;
  report.wellformed_rate = WellformedRate(wellformed);
  for (size_t i = 0; i < pred.size(); ++i) {
    PassageReport row;
    row.id = std::to_string(i + 1);
    row.tokens = gold[i].length();
    row.counts = CountMatches(pred[i], gold[i], unit);
    row.prf = row.counts.Score();
    report.counts += row.counts;
    report.predicted_lengths.Add(pred[i]);
    report.reference_lengths.Add(gold[i]);
    report.passages.push_back(std::move(row));
  }
  report.micro = report.counts.Score();
  report.macro = MacroPrf(pred, gold, unit);
  return report;
}

std::string EvalReport::ToJson() const {
  nlohmann::ordered_json j;
  j["passages"] = passages.size();
  j["unit"] = unit == MatchUnit::kBoundary ? "boundary" : "segment";
  j["wellformed_rate"] = wellformed_rate;
  j["precision"] = micro.precision;
  j["recall"] = micro.recall;
  j["f1"] = micro.f1;
  j["matched"] = counts.matched;
  j["predicted"] = counts.predicted;
  j["reference"] = counts.reference;
  j["macro"] = PrfJson(macro);
  nlohmann::ordered_json hist;
  std::vector<std::string> bins;
  for (size_t b = 0; b < predicted_lengths.num_bins(); ++b) {
    bins.push_back(predicted_lengths.BinLabel(b));
  }
  hist["bins"] = bins;
  hist["predicted"] = predicted_lengths.counts();
  hist["reference"] = reference_lengths.counts();
  j["length_histogram"] = std::move(hist);
  return j.dump(2);
}

void EvalReport::WritePassageCsv(std::ostream& os) const {
  os << "passage,tokens,matched,predicted,reference,precision,recall,f1\n";
  for (const auto& p : passages) {
    os << p.id << ',' << p.tokens << ',' << p.counts.matched << ','
       << p.counts.predicted << ',' << p.counts.reference << ','
       << p.prf.precision << ',' << p.prf.recall << ',' << p.prf.f1 << '\n';
  }
}

}  // namespace segfst
