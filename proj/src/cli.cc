#include "segfst/cli.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "segfst/constraints.h"
#include "segfst/decoding.h"
#include "segfst/error.h"
#include "segfst/evaluation.h"
#include "segfst/external_scorer.h"
#include "segfst/longform.h"
#include "segfst/ngram.h"
#include "segfst/scoring.h"
#include "segfst/segmentation.h"

namespace segfst::cli {

namespace {

// Data-level failure already reported with its context.
struct DataFailure {
  int code;
};

std::shared_ptr<spdlog::logger> MakeLogger() {
  auto logger = spdlog::stderr_color_mt("segfst");
  logger->set_pattern("segfst [%l] %v");
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("SEGFST_LOG")) {
    level = spdlog::level::from_str(env);
  }
  logger->set_level(level);
  return logger;
}

spdlog::logger& Log() {
  static std::shared_ptr<spdlog::logger> logger = MakeLogger();
  return *logger;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::vector<std::string> lines;
  std::string line;
  if (path == "-") {
    while (std::getline(std::cin, line)) lines.push_back(line);
    return lines;
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read '" + path + "'");
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

bool LooksUnnormalized(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) {
    for (char c : t) {
      auto u = static_cast<unsigned char>(c);
      if (std::isupper(u) || (std::ispunct(u) && c != '\'')) return true;
    }
  }
  return false;
}

int ExitCodeFor(const Error& e) {
  return e.code() == ErrorCode::kScorerUnavailable ? kExitScorer : kExitData;
}

// "kind:argument" scorer selection.
struct ScorerChoice {
  std::string kind;
  std::string argument;

  static std::optional<ScorerChoice> Parse(const std::string& text) {
    size_t colon = text.find(':');
    if (colon == std::string::npos) return std::nullopt;
    ScorerChoice c{text.substr(0, colon), text.substr(colon + 1)};
    if (c.argument.empty()) return std::nullopt;
    if (c.kind == "ngram" || c.kind == "external") return c;
    if (c.kind == "mock" &&
        (c.argument == "copy" || c.argument == "hallucinate" ||
         c.argument == "random")) {
      return c;
    }
    return std::nullopt;
  }
};

std::string ValidateScorer(const std::string& text) {
  if (ScorerChoice::Parse(text)) return {};
  return "expected ngram:<model>, external:<command> or "
         "mock:{copy,hallucinate,random}, got '" + text + "'";
}

std::unique_ptr<Scorer> MakeScorer(const std::string& text, uint64_t seed,
                                   double timeout_seconds) {
  ScorerChoice choice = *ScorerChoice::Parse(text);
  if (choice.kind == "ngram") {
    std::ifstream in(choice.argument);
    if (!in) throw Error(ErrorCode::kIo, "cannot read model '" + choice.argument + "'");
    return std::make_unique<NgramScorer>(NgramModel::Load(in));
  }
  if (choice.kind == "external") {
    auto timeout = std::chrono::milliseconds(
        static_cast<int64_t>(timeout_seconds * 1000.0));
    return std::make_unique<ExternalScorer>(choice.argument, timeout);
  }
  return MakeMockScorer(choice.argument, seed);
}

// ---------------------------------------------------------------- segment

struct SegmentOptions {
  std::string input = "-";
  std::string output = "-";
  WindowSpec spec;
  int beam = 4;
  std::string mode = "fst";
  std::string scorer;
  uint64_t seed = 0;
  std::string dump_fst;
  std::string report;
  int jobs = 1;
  double timeout = 30.0;
};

struct PassageOutcome {
  std::optional<PassageResult> result;
  std::optional<Error> error;
};

int RunSegment(const SegmentOptions& opt) {
  std::vector<std::string> lines = ReadLines(opt.input);
  if (lines.empty()) Log().warn("input '{}' is empty", opt.input);

  DecodeConfig cfg;
  cfg.beam_size = opt.beam;
  cfg.mode = ParseDecodeMode(opt.mode);

  std::unique_ptr<Scorer> scorer = MakeScorer(opt.scorer, opt.seed, opt.timeout);

  std::vector<std::vector<std::string>> passages;
  passages.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    passages.push_back(SplitWhitespace(lines[i]));
    if (LooksUnnormalized(passages.back())) {
      Log().warn("passage {}: uppercase or punctuation in input", i + 1);
    }
  }

  std::vector<PassageOutcome> outcomes(passages.size());
  auto work = [&](size_t i) {
    if (passages[i].empty()) return;
    try {
      outcomes[i].result =
          SegmentPassage(passages[i], opt.spec, *scorer, cfg);
    } catch (const Error& e) {
      outcomes[i].error = e;
    }
  };
  int jobs = std::max(1, opt.jobs);
  if (jobs > 1 && !scorer->IsShareable()) {
    Log().info("scorer is not shareable; decoding sequentially");
    jobs = 1;
  }
  if (jobs == 1) {
    for (size_t i = 0; i < passages.size(); ++i) {
      work(i);
      if (outcomes[i].error) break;
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < passages.size(); i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  Output out(opt.output);
  std::optional<Output> dump;
  std::optional<Output> report;
  if (!opt.dump_fst.empty()) dump.emplace(opt.dump_fst);
  if (!opt.report.empty()) report.emplace(opt.report);

  for (size_t i = 0; i < passages.size(); ++i) {
    if (outcomes[i].error) {
      Log().error("passage {}: {}", i + 1, outcomes[i].error->what());
      return ExitCodeFor(*outcomes[i].error);
    }
    if (!outcomes[i].result) {
      out.stream() << '\n';
      continue;
    }
    const PassageResult& r = *outcomes[i].result;
    out.stream() << JoinTokens(r.segmentation.Render(passages[i])) << '\n';
    for (size_t k = 0; k < r.windows.size(); ++k) {
      const DecodeResult& w = r.windows[k];
      const WindowSlot& slot = r.plan[k];
      Log().debug("passage {} window {} [{}, {}) wellformed={} score={}",
                  i + 1, k, slot.span_begin, slot.span_end, w.wellformed,
                  w.score);
      if (dump) {
        dump->stream() << "# passage " << i + 1 << " window " << k << '\n';
        WriteText(CompileWindowConstraint(w.window), dump->stream(),
                  &w.symbols);
      }
      if (report) {
        nlohmann::ordered_json row;
        row["passage"] = i + 1;
        row["window"] = k;
        row["span"] = {slot.span_begin, slot.span_end};
        row["adopt"] = {slot.adopt_begin, slot.adopt_end};
        row["wellformed"] = w.wellformed;
        row["reason"] = w.malformed_reason;
        row["score"] = w.score;
        row["generated"] = JoinTokens(w.GeneratedText());
        report->stream() << row.dump() << '\n';
      }
    }
  }
  return kExitOk;
}

// --------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string pred;
  std::string gold;
  std::string report;
  std::string passage_csv;
  std::string histogram_csv;
  std::string unit = "boundary";
};

std::vector<DelimitedText> ParseDelimitedFile(const std::string& path,
                                              const std::string& what) {
  std::vector<DelimitedText> out;
  std::vector<std::string> lines = ReadLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    try {
      out.push_back(ParseDelimited(TokenizeDelimitedLine(lines[i])));
    } catch (const Error& e) {
      Log().error("{} line {}: {}", what, i + 1, e.what());
      throw DataFailure{kExitData};
    }
  }
  return out;
}

int RunEvaluate(const EvaluateOptions& opt) {
  std::vector<DelimitedText> pred = ParseDelimitedFile(opt.pred, "pred");
  std::vector<DelimitedText> gold = ParseDelimitedFile(opt.gold, "gold");
  if (pred.size() != gold.size()) {
    Log().error("pred has {} lines, gold has {}", pred.size(), gold.size());
    return kExitData;
  }
  std::vector<Segmentation> p;
  std::vector<Segmentation> g;
  for (size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].tokens.size() != gold[i].tokens.size()) {
      Log().error("line {}: pred has {} tokens, gold has {}", i + 1,
                  pred[i].tokens.size(), gold[i].tokens.size());
      return kExitData;
    }
    if (pred[i].tokens != gold[i].tokens) {
      Log().warn("line {}: pred and gold tokens differ", i + 1);
    }
    p.push_back(pred[i].segmentation);
    g.push_back(gold[i].segmentation);
  }

  std::vector<char> flags;
  if (!opt.report.empty()) {
    for (const std::string& line : ReadLines(opt.report)) {
      if (line.empty()) continue;
      try {
        flags.push_back(nlohmann::json::parse(line).at("wellformed").get<bool>());
      } catch (const nlohmann::json::exception& e) {
        Log().error("decode report: {}", e.what());
        return kExitData;
      }
    }
  }
  // std::vector<bool> cannot back a span.
  auto wf = std::make_unique<bool[]>(flags.size());
  for (size_t i = 0; i < flags.size(); ++i) wf[i] = flags[i] != 0;

  MatchUnit unit =
      opt.unit == "segment" ? MatchUnit::kSegment : MatchUnit::kBoundary;
  EvalReport report =
      Evaluate(p, g, std::span<const bool>(wf.get(), flags.size()), unit);
  std::cout << report.ToJson() << '\n';
  if (!opt.passage_csv.empty()) {
    Output csv(opt.passage_csv);
    report.WritePassageCsv(csv.stream());
  }
  if (!opt.histogram_csv.empty()) {
    Output csv(opt.histogram_csv);
    csv.stream() << "bin,predicted,reference\n";
    for (size_t b = 0; b < report.predicted_lengths.num_bins(); ++b) {
      csv.stream() << report.predicted_lengths.BinLabel(b) << ','
                   << report.predicted_lengths.counts()[b] << ','
                   << report.reference_lengths.counts()[b] << '\n';
    }
  }
  return kExitOk;
}

// ----------------------------------------------------------------- oracle

struct OracleCliOptions {
  std::string ref;
  std::string asr;
  std::string output = "-";
  std::string gold_output;
  std::string abbreviations;
};

int RunOracle(const OracleCliOptions& opt) {
  std::vector<std::string> ref = ReadLines(opt.ref);
  std::vector<std::string> asr = ReadLines(opt.asr);
  if (ref.size() != asr.size()) {
    Log().error("reference has {} lines, ASR has {}", ref.size(), asr.size());
    return kExitData;
  }
  OracleOptions options;
  if (!opt.abbreviations.empty()) {
    for (const std::string& line : ReadLines(opt.abbreviations)) {
      for (const std::string& w : SplitWhitespace(line)) {
        std::string lower = w;
        for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        options.abbreviations.insert(lower);
      }
    }
  }
  Output out(opt.output);
  std::optional<Output> gold;
  if (!opt.gold_output.empty()) gold.emplace(opt.gold_output);
  for (size_t i = 0; i < ref.size(); ++i) {
    std::vector<std::string> ref_words = SplitWhitespace(ref[i]);
    std::vector<std::string> asr_words = SplitWhitespace(asr[i]);
    DelimitedText derived = ReferenceSegmentation(ref_words, options);
    if (!derived.tokens.empty() && derived.segmentation.boundaries().empty()) {
      Log().warn("line {}: reference has no sentence-internal boundary", i + 1);
    }
    Segmentation projected = OracleSegment(ref_words, asr_words, options);
    out.stream() << JoinTokens(projected.Render(asr_words)) << '\n';
    if (gold) {
      gold->stream() << JoinTokens(derived.segmentation.Render(derived.tokens))
                     << '\n';
    }
  }
  return kExitOk;
}

// ------------------------------------------------------------------ train

struct TrainOptions {
  std::string corpus;
  std::string output;
  int order = 3;
  double k = 0.1;
  bool no_end_marker = false;
};

int RunTrain(const TrainOptions& opt) {
  std::vector<std::vector<std::string>> corpus;
  std::vector<std::string> lines = ReadLines(opt.corpus);
  for (size_t i = 0; i < lines.size(); ++i) {
    std::vector<std::string> words = TokenizeDelimitedLine(lines[i]);
    if (words.empty()) continue;
    try {
      ParseDelimited(words);
    } catch (const Error& e) {
      Log().error("corpus line {}: {}", i + 1, e.what());
      return kExitData;
    }
    corpus.push_back(std::move(words));
  }
  NgramModel model = NgramModel::Train(
      corpus, NgramOptions{opt.order, opt.k, !opt.no_end_marker});
  Output out(opt.output);
  model.Save(out.stream());
  Log().info("trained order-{} model on {} sequences", opt.order, corpus.size());
  return kExitOk;
}

// ---------------------------------------------------------------- windows

int RunWindows(size_t n, const WindowSpec& spec) {
  WindowPlan plan = MakeWindows(n, spec);
  std::cout << "window\tspan_begin\tspan_end\tadopt_begin\tadopt_end\n";
  for (size_t k = 0; k < plan.size(); ++k) {
    const WindowSlot& s = plan[k];
    std::cout << k << '\t' << s.span_begin << '\t' << s.span_end << '\t'
              << s.adopt_begin << '\t' << s.adopt_end << '\n';
  }
  return kExitOk;
}

void AddWindowFlags(CLI::App* cmd, WindowSpec& spec) {
  cmd->add_option("-w,--window-size", spec.window, "window size w")
      ->capture_default_str();
  cmd->add_option("-b,--context", spec.context, "total context size b")
      ->capture_default_str();
  cmd->add_option("-r,--right-context", spec.right_context,
                  "right context size r")
      ->capture_default_str();
}

}  // namespace

int Run(int argc, const char* const* argv) {
  CLI::App app{"Segment unpunctuated transcripts with constrained decoding"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "segfst 0.1.0");

  SegmentOptions seg;
  auto* segment = app.add_subcommand("segment", "segment passages, one per line");
  segment->add_option("-i,--input", seg.input, "input file ('-' for stdin)")
      ->capture_default_str();
  segment->add_option("-o,--output", seg.output, "output file ('-' for stdout)")
      ->capture_default_str();
  AddWindowFlags(segment, seg.spec);
  segment->add_option("--beam", seg.beam, "beam size (1 = greedy)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  segment->add_option("--mode", seg.mode, "fst, repair or none")
      ->check(CLI::IsMember({"fst", "repair", "none"}))
      ->capture_default_str();
  segment->add_option("--scorer", seg.scorer,
                      "ngram:<model>, external:<command> or mock:<name>")
      ->required()
      ->check(CLI::Validator(ValidateScorer, "SCORER"));
  segment->add_option("--seed", seg.seed, "seed for randomized test scorers");
  segment->add_option("--dump-fst", seg.dump_fst,
                      "write each window's constraint automaton here");
  segment->add_option("--report", seg.report,
                      "write per-window JSON lines diagnostics here");
  segment->add_option("-j,--jobs", seg.jobs, "passages decoded in parallel")
      ->check(CLI::PositiveNumber);
  segment->add_option("--scorer-timeout", seg.timeout,
                      "seconds to wait for an external scorer")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "score predictions against gold");
  evaluate->add_option("--pred", ev.pred, "predicted delimited lines")->required();
  evaluate->add_option("--gold", ev.gold, "reference delimited lines")->required();
  evaluate->add_option("--report", ev.report,
                       "decode report from 'segment --report'");
  evaluate->add_option("--per-passage-csv", ev.passage_csv);
  evaluate->add_option("--histogram-csv", ev.histogram_csv);
  evaluate->add_option("--unit", ev.unit, "boundary or segment")
      ->check(CLI::IsMember({"boundary", "segment"}))
      ->capture_default_str();

  OracleCliOptions orc;
  auto* oracle = app.add_subcommand(
      "oracle", "project reference punctuation onto ASR transcripts");
  oracle->add_option("--ref", orc.ref, "punctuated reference lines")->required();
  oracle->add_option("--asr", orc.asr, "ASR transcript lines")->required();
  oracle->add_option("-o,--output", orc.output, "segmented ASR output")
      ->capture_default_str();
  oracle->add_option("--gold-output", orc.gold_output,
                     "normalized reference with derived boundaries");
  oracle->add_option("--abbreviations", orc.abbreviations,
                     "whitespace-separated tokens that never end a sentence");

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "train an n-gram scorer");
  train->add_option("--corpus", tr.corpus, "delimited training lines")->required();
  train->add_option("-o,--output", tr.output, "model file")->required();
  train->add_option("--order", tr.order)
      ->check(CLI::Range(1, 16))
      ->capture_default_str();
  train->add_option("--k", tr.k, "add-k smoothing constant")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_flag("--no-end-marker", tr.no_end_marker);

  size_t n = 0;
  WindowSpec win;
  auto* windows = app.add_subcommand("windows", "print the window plan");
  windows->add_option("n", n, "passage length")->required()->check(CLI::PositiveNumber);
  windows->add_option("w", win.window, "window size")->capture_default_str();
  windows->add_option("b", win.context, "total context size")->capture_default_str();
  windows->add_option("r", win.right_context, "right context size")
      ->capture_default_str();

  std::string policy = "copy";
  uint64_t serve_seed = 0;
  auto* serve = app.add_subcommand(
      "serve-mock", "answer scorer protocol requests with a mock policy");
  serve->add_option("--policy", policy)
      ->check(CLI::IsMember({"copy", "hallucinate", "random"}))
      ->capture_default_str();
  serve->add_option("--seed", serve_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*segment) return RunSegment(seg);
    if (*evaluate) return RunEvaluate(ev);
    if (*oracle) return RunOracle(orc);
    if (*train) return RunTrain(tr);
    if (*windows) {
      try {
        win.Validate();
      } catch (const Error& e) {
        Log().error("{}", e.what());
        return kExitUsage;
      }
      return RunWindows(n, win);
    }
    if (*serve) {
      auto scorer = MakeMockScorer(policy, serve_seed);
      ServeScorer(*scorer, std::cin, std::cout);
      return kExitOk;
    }
  } catch (const DataFailure& f) {
    return f.code;
  } catch (const Error& e) {
    Log().error("{}", e.what());
    if (e.code() == ErrorCode::kInvalidSpec) return kExitUsage;
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    Log().error("{}", e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace segfst::cli
