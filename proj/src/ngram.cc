#include "segfst/ngram.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <string_view>

#include "json.hpp"

#include "segfst/error.h"

namespace segfst {

namespace {

constexpr const char* kFormatName = "segfst-ngram";
constexpr int kFormatVersion = 1;

std::string JoinRange(std::span<const std::string> items) {
  std::string key;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) key += ' ';
    key += items[i];
  }
  return key;
}

void ValidateOptions(const NgramOptions& options) {
  if (options.order < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "n-gram order must be at least 1, got " +
                    std::to_string(options.order));
  }
  if (!(options.k > 0.0) || !std::isfinite(options.k)) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing constant must be > 0");
  }
}

}  // namespace

NgramModel NgramModel::Train(std::span<const std::vector<std::string>> corpus,
                             const NgramOptions& options) {
  ValidateOptions(options);
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no training sequences");
  }
  NgramModel model;
  model.options_ = options;
  const size_t pad = options.order - 1;
  for (const auto& sequence : corpus) {
    std::vector<std::string> padded(pad, std::string(kBeginSymbol));
    padded.insert(padded.end(), sequence.begin(), sequence.end());
    if (options.end_marker) padded.emplace_back(kEndSymbol);
    for (size_t i = pad; i < padded.size(); ++i) {
      for (size_t len = 0; len <= pad; ++len) {
        std::string key = JoinRange(
            std::span<const std::string>(padded).subspan(i - len, len));
        ++model.counts_[key][padded[i]];
        ++model.totals_[key];
      }
    }
  }
  if (model.counts_.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "corpus contains no tokens");
  }
  return model;
}

std::string NgramModel::ContextFor(
    std::span<const std::string> history) const {
  const size_t pad = options_.order - 1;
  std::vector<std::string> tail;
  size_t take = std::min(pad, history.size());
  tail.assign(pad - take, std::string(kBeginSymbol));
  tail.insert(tail.end(), history.end() - take, history.end());
  for (size_t len = pad; len >= 1; --len) {
    std::string key = JoinRange(std::span<const std::string>(tail).last(len));
    if (totals_.contains(key)) return key;
  }
  return "";
}

double NgramModel::LogProb(std::span<const std::string> history,
                           const std::string& word,
                           std::span<const std::string> vocab) const {
  return LogProbs(history, std::span<const std::string>(&word, 1), vocab)[0];
}

std::vector<double> NgramModel::LogProbs(
    std::span<const std::string> history, std::span<const std::string> words,
    std::span<const std::string> vocab) const {
  const std::set<std::string> closed(vocab.begin(), vocab.end());
  const bool pooled = closed.contains(std::string(kUnknownSymbol));
  const std::vector<std::string> items(closed.begin(), closed.end());
  const double mass = options_.k * static_cast<double>(items.size());

  const size_t pad = options_.order - 1;
  std::vector<std::string> tail;
  size_t take = std::min(pad, history.size());
  tail.assign(pad - take, std::string(kBeginSymbol));
  tail.insert(tail.end(), history.end() - take, history.end());

  // Start uniform; each seen context, shortest first, re-estimates with
  // k * |V| pseudo-counts spread by the previous estimate.
  std::vector<double> prob(items.size(), 1.0 / static_cast<double>(items.size()));
  std::vector<double> counts(items.size());
  for (size_t len = 0; len <= pad; ++len) {
    auto row = counts_.find(JoinRange(std::span<const std::string>(tail).last(len)));
    if (row == counts_.end()) break;
    const ContinuationCounts& seen = row->second;
    const uint64_t total = totals_.at(row->first);
    uint64_t known = 0;
    size_t unk_index = items.size();
    for (size_t i = 0; i < items.size(); ++i) {
      if (items[i] == kUnknownSymbol) {
        unk_index = i;
        counts[i] = 0.0;
        continue;
      }
      auto it = seen.find(items[i]);
      uint64_t c = it == seen.end() ? 0 : it->second;
      known += c;
      counts[i] = static_cast<double>(c);
    }
    if (pooled) counts[unk_index] = static_cast<double>(total - known);
    const double denominator = static_cast<double>(pooled ? total : known) + mass;
    for (size_t i = 0; i < items.size(); ++i) {
      prob[i] = (counts[i] + mass * prob[i]) / denominator;
    }
  }

  std::vector<double> out;
  out.reserve(words.size());
  for (const std::string& word : words) {
    auto it = std::lower_bound(items.begin(), items.end(), word);
    if (it == items.end() || *it != word) {
      throw Error(ErrorCode::kInvalidArgument,
                  "'" + word + "' is not in the query vocabulary");
    }
    out.push_back(std::log(prob[it - items.begin()]));
  }
  return out;
}

void NgramModel::Save(std::ostream& os) const {
  nlohmann::ordered_json doc;
  doc["format"] = kFormatName;
  doc["version"] = kFormatVersion;
  doc["order"] = options_.order;
  doc["k"] = options_.k;
  doc["end_marker"] = options_.end_marker;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [context, continuations] : counts_) {
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (const auto& [word, count] : continuations) row[word] = count;
    counts[context] = std::move(row);
  }
  doc["counts"] = std::move(counts);
  os << doc.dump(1) << '\n';
}

NgramModel NgramModel::Load(std::istream& is) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("n-gram model: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormatName ||
        doc.at("version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kParse, "unsupported n-gram model format");
    }
    NgramModel model;
    model.options_.order = doc.at("order").get<int>();
    model.options_.k = doc.at("k").get<double>();
    model.options_.end_marker = doc.at("end_marker").get<bool>();
    ValidateOptions(model.options_);
    for (const auto& [context, row] : doc.at("counts").items()) {
      uint64_t total = 0;
      for (const auto& [word, count] : row.items()) {
        uint64_t c = count.get<uint64_t>();
        model.counts_[context][word] = c;
        total += c;
      }
      model.totals_[context] = total;
    }
    if (!model.totals_.contains("")) {
      throw Error(ErrorCode::kParse, "n-gram model lacks unigram counts");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("n-gram model: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    throw Error(ErrorCode::kParse, e.what());
  }
}

std::vector<double> NgramScorer::ScoreNext(const ScorerContext& ctx,
                                           std::span<const Label> candidates) {
  if (ctx.symbols == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "n-gram scorer needs symbols");
  }
  const SymbolTable& symbols = *ctx.symbols;
  std::vector<std::string> vocab;
  vocab.reserve(ctx.window.size() + 3);
  for (Label l : ctx.window) vocab.push_back(symbols.Symbol(l));
  vocab.emplace_back(kDelimiterSymbol);
  vocab.emplace_back(kUnknownSymbol);
  vocab.emplace_back(kEndSymbol);
  const size_t keep =
      std::min(ctx.prefix.size(), static_cast<size_t>(model_.order() - 1));
  std::vector<std::string> history = symbols.Decode(ctx.prefix.last(keep));
  std::vector<std::string> words = symbols.Decode(candidates);
  return model_.LogProbs(history, words, vocab);
}

}  // namespace segfst
