// Python bindings for the segmentation toolkit.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>
#include <fstream>
#include <sstream>

#include "segfst/alignment.h"
#include "segfst/constraints.h"
#include "segfst/decoding.h"
#include "segfst/error.h"
#include "segfst/evaluation.h"
#include "segfst/external_scorer.h"
#include "segfst/fst.h"
#include "segfst/longform.h"
#include "segfst/ngram.h"
#include "segfst/scoring.h"
#include "segfst/segmentation.h"

namespace py = pybind11;

namespace segfst {
namespace {

using Words = std::vector<std::string>;

// Scorer implemented in Python over plain strings.
class PythonScorer : public Scorer {
 public:
  virtual std::vector<double> ScoreStrings(const Words& window, const Words& prefix,
                                           const Words& candidates) = 0;

  std::vector<double> ScoreNext(const ScorerContext& ctx,
                                std::span<const Label> candidates) override {
    Words w = ctx.symbols->Decode(ctx.window);
    Words p = ctx.symbols->Decode(ctx.prefix);
    Words c = ctx.symbols->Decode(candidates);
    std::vector<double> out = ScoreStrings(w, p, c);
    if (out.size() != candidates.size()) {
      throw Error(ErrorCode::kScorerUnavailable,
                  "python scorer returned " + std::to_string(out.size()) +
                      " scores for " + std::to_string(candidates.size()) + " candidates");
    }
    return out;
  }
  bool IsShareable() const override { return false; }
};

class PyPythonScorer : public PythonScorer {
 public:
  std::vector<double> ScoreStrings(const Words& window, const Words& prefix,
                                   const Words& candidates) override {
    PYBIND11_OVERRIDE_PURE_NAME(std::vector<double>, PythonScorer, "score_next",
                                ScoreStrings, window, prefix, candidates);
  }
};

std::vector<double> ScoreWithStrings(Scorer& scorer, const Words& window,
                                     const Words& prefix, const Words& candidates) {
  SymbolTable table;
  std::vector<Label> w = table.Encode(window);
  std::vector<Label> p = table.Encode(prefix);
  std::vector<Label> c = table.Encode(candidates);
  ScorerContext ctx{w, p, &table};
  return scorer.ScoreNext(ctx, c);
}

// Window constraint packaged with the symbol table it was built over.
struct Constraint {
  SymbolTable table;
  Automaton automaton{FstKind::kAcceptor};

  bool Accepts(const Words& words) const {
    std::vector<Label> labels;
    for (const auto& w : words) {
      auto l = table.Find(w);
      if (!l) return false;
      labels.push_back(*l);
    }
    return segfst::Accepts(automaton, labels);
  }
  std::string Text() const {
    std::ostringstream os;
    WriteText(automaton, os, &table);
    return os.str();
  }
};

DecodeConfig MakeConfig(int beam, const std::string& mode, std::optional<size_t> max_len) {
  DecodeConfig cfg;
  cfg.beam_size = beam;
  cfg.mode = ParseDecodeMode(mode);
  cfg.max_output_len = max_len;
  return cfg;
}

py::object OptionalSegmentation(const std::optional<Segmentation>& s) {
  if (!s) return py::none();
  return py::cast(*s);
}

const char* EditKindName(EditKind k) {
  switch (k) {
    case EditKind::kMatch: return "match";
    case EditKind::kSubstitute: return "substitute";
    case EditKind::kDelete: return "delete";
    case EditKind::kInsert: return "insert";
  }
  return "?";
}

py::object Index(size_t i) {
  if (i == EditOp::kNone) return py::none();
  return py::int_(i);
}

MatchUnit ParseUnit(const std::string& unit) {
  if (unit == "boundary") return MatchUnit::kBoundary;
  if (unit == "segment") return MatchUnit::kSegment;
  throw Error(ErrorCode::kInvalidArgument, "unit must be 'boundary' or 'segment'");
}

}  // namespace
}  // namespace segfst

PYBIND11_MODULE(_segfst, m) {
  using namespace segfst;
  m.doc() = "Constrained segmentation of unpunctuated transcripts.";

  // Exception types live as long as the interpreter; never released.
  static PyObject* error_type =
      PyErr_NewException("segfst.SegfstError", PyExc_RuntimeError, nullptr);
  static PyObject* not_wellformed_type =
      PyErr_NewException("segfst.NotWellformedError", error_type, nullptr);
  m.attr("SegfstError") = py::handle(error_type);
  m.attr("NotWellformedError") = py::handle(not_wellformed_type);
  py::register_exception_translator([](std::exception_ptr p) {
    auto raise = [](PyObject* type, const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(type)(e.what());
      exc.attr("code") = ErrorCodeName(e.code());
      return exc;
    };
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NotWellformedError& e) {
      py::object exc = raise(not_wellformed_type, e);
      exc.attr("reason") = MalformedReasonName(e.reason());
      PyErr_SetObject(not_wellformed_type, exc.ptr());
    } catch (const Error& e) {
      py::object exc = raise(error_type, e);
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  // Segmentations.
  py::class_<Segmentation>(m, "Segmentation")
      .def(py::init<size_t, std::vector<size_t>>(), py::arg("length"),
           py::arg("boundaries") = std::vector<size_t>{})
      .def_property_readonly("length", &Segmentation::length)
      .def_property_readonly("boundaries", &Segmentation::boundaries)
      .def_property_readonly("num_segments", &Segmentation::num_segments)
      .def("segment_lengths", &Segmentation::SegmentLengths)
      .def("render", [](const Segmentation& s, const Words& tokens) {
        return s.Render(tokens);
      })
      .def("__contains__", &Segmentation::Contains)
      .def(py::self == py::self)
      .def("__repr__", [](const Segmentation& s) {
        std::string out = "Segmentation(" + std::to_string(s.length()) + ", [";
        for (size_t i = 0; i < s.boundaries().size(); ++i) {
          if (i) out += ", ";
          out += std::to_string(s.boundaries()[i]);
        }
        return out + "])";
      });

  m.def("parse_segmentation", [](const Words& generated, const Words& input) {
    SymbolTable table;
    std::vector<Label> in = table.Encode(input);
    std::vector<Label> gen = table.Encode(generated);
    return ParseSegmentation(gen, in);
  }, py::arg("generated"), py::arg("input"));
  m.def("parse_delimited", [](const std::string& line) {
    DelimitedText d = ParseDelimited(TokenizeDelimitedLine(line));
    return py::make_tuple(d.tokens, d.segmentation);
  }, py::arg("line"));

  // Constraints.
  py::class_<Constraint>(m, "Constraint")
      .def_property_readonly("num_states",
                             [](const Constraint& c) { return c.automaton.NumStates(); })
      .def_property_readonly("num_arcs",
                             [](const Constraint& c) { return c.automaton.NumArcs(); })
      .def("count_paths", [](const Constraint& c) { return CountPaths(c.automaton); })
      .def("is_deterministic",
           [](const Constraint& c) { return IsDeterministic(c.automaton); })
      .def("accepts", &Constraint::Accepts, py::arg("words"))
      .def("to_text", &Constraint::Text);
  m.def("compile_window_constraint", [](const Words& tokens, bool by_composition) {
    Constraint c;
    c.automaton = by_composition ? CompileWindowConstraintByComposition(tokens, c.table)
                                 : CompileWindowConstraint(tokens, c.table);
    return c;
  }, py::arg("tokens"), py::arg("by_composition") = false);
  m.def("bio_constraint", [](const Words& types, std::optional<size_t> length) {
    Constraint c;
    c.automaton = BuildBioConstraint(types, c.table);
    if (length) c.automaton = RestrictLength(c.automaton, *length);
    return c;
  }, py::arg("chunk_types"), py::arg("length") = py::none());

  // Alignment.
  py::class_<AlignmentPath>(m, "AlignmentPath")
      .def_readonly("cost", &AlignmentPath::cost)
      .def_readonly("src_length", &AlignmentPath::src_length)
      .def_readonly("tgt_length", &AlignmentPath::tgt_length)
      .def_property_readonly("ops", [](const AlignmentPath& p) {
        py::list out;
        for (const EditOp& op : p.ops) {
          out.append(py::make_tuple(EditKindName(op.kind), Index(op.src), Index(op.tgt)));
        }
        return out;
      });
  m.def("levenshtein_align", [](const Words& src, const Words& tgt) {
    return LevenshteinAlign(src, tgt);
  }, py::arg("src"), py::arg("tgt"));
  m.def("project_boundaries", &ProjectBoundaries, py::arg("segmentation"),
        py::arg("path"), py::arg("tgt_length"));
  m.def("repair_output", [](const Words& generated, const Words& input) {
    return RepairOutput(generated, input);
  }, py::arg("generated"), py::arg("input"));

  // Scorers.
  py::class_<Scorer>(m, "Scorer")
      .def("score_next", &ScoreWithStrings, py::arg("window"), py::arg("prefix"),
           py::arg("candidates"));
  py::class_<PythonScorer, Scorer, PyPythonScorer>(m, "PythonScorer")
      .def(py::init<>());
  py::class_<CopyScorer, Scorer>(m, "CopyScorer").def(py::init<>());
  py::class_<HallucinateScorer, Scorer>(m, "HallucinateScorer").def(py::init<>());
  py::class_<RandomScorer, Scorer>(m, "RandomScorer")
      .def(py::init<uint64_t>(), py::arg("seed"));
  py::class_<CopyWithBoundaryScorer, Scorer>(m, "CopyWithBoundaryScorer")
      .def(py::init<std::set<std::string>, std::set<size_t>>(),
           py::arg("before_tokens"), py::arg("before_positions") = std::set<size_t>{});
  py::class_<ExternalScorer, Scorer>(m, "ExternalScorer")
      .def(py::init([](const std::string& command, double timeout) {
             return std::make_unique<ExternalScorer>(
                 command, std::chrono::milliseconds(static_cast<int64_t>(timeout * 1000)));
           }),
           py::arg("command"), py::arg("timeout") = 30.0);

  py::class_<NgramModel>(m, "NgramModel")
      .def_static("train",
                  [](const std::vector<Words>& corpus, int order, double k, bool end_marker) {
                    NgramOptions opt;
                    opt.order = order;
                    opt.k = k;
                    opt.end_marker = end_marker;
                    return NgramModel::Train(corpus, opt);
                  },
                  py::arg("corpus"), py::arg("order") = 3, py::arg("k") = 0.1,
                  py::arg("end_marker") = true)
      .def_property_readonly("order", &NgramModel::order)
      .def_property_readonly("k", &NgramModel::k)
      .def("log_prob",
           [](const NgramModel& model, const Words& history, const std::string& word,
              const Words& vocab) { return model.LogProb(history, word, vocab); },
           py::arg("history"), py::arg("word"), py::arg("vocab"))
      .def("save", [](const NgramModel& model, const std::string& path) {
        std::ofstream out(path);
        if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
        model.Save(out);
      }, py::arg("path"))
      .def_static("load", [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
        return NgramModel::Load(in);
      }, py::arg("path"))
      .def(py::self == py::self);
  py::class_<NgramScorer, Scorer>(m, "NgramScorer")
      .def(py::init<NgramModel>(), py::arg("model"));

  // Decoding.
  py::class_<DecodeResult>(m, "DecodeResult")
      .def_property_readonly("generated", &DecodeResult::GeneratedText)
      .def_readonly("score", &DecodeResult::score)
      .def_readonly("wellformed", &DecodeResult::wellformed)
      .def_readonly("malformed_reason", &DecodeResult::malformed_reason)
      .def_property_readonly("segmentation", [](const DecodeResult& r) {
        return OptionalSegmentation(r.segmentation);
      });
  m.def("decode_window",
        [](Scorer& scorer, const Words& window, int beam_size, const std::string& mode,
           std::optional<size_t> max_output_len) {
          return DecodeWindow(scorer, window, MakeConfig(beam_size, mode, max_output_len));
        },
        py::arg("scorer"), py::arg("window"), py::arg("beam_size") = 4,
        py::arg("mode") = "fst", py::arg("max_output_len") = py::none());

  // Long-form.
  py::class_<WindowSlot>(m, "WindowSlot")
      .def_readonly("span_begin", &WindowSlot::span_begin)
      .def_readonly("span_end", &WindowSlot::span_end)
      .def_readonly("adopt_begin", &WindowSlot::adopt_begin)
      .def_readonly("adopt_end", &WindowSlot::adopt_end)
      .def("__repr__", [](const WindowSlot& s) {
        return "WindowSlot(span=[" + std::to_string(s.span_begin) + ", " +
               std::to_string(s.span_end) + "), adopt=[" + std::to_string(s.adopt_begin) +
               ", " + std::to_string(s.adopt_end) + "))";
      });
  m.def("make_windows", [](size_t n, size_t w, size_t b, size_t r) {
    return MakeWindows(n, WindowSpec{w, b, r});
  }, py::arg("n"), py::arg("w") = 40, py::arg("b") = 10, py::arg("r") = 5);
  py::class_<PassageResult>(m, "PassageResult")
      .def_readonly("segmentation", &PassageResult::segmentation)
      .def_readonly("plan", &PassageResult::plan)
      .def_readonly("windows", &PassageResult::windows);
  m.def("segment_passage",
        [](Scorer& scorer, const Words& tokens, size_t w, size_t b, size_t r, int beam_size,
           const std::string& mode) {
          return SegmentPassage(tokens, WindowSpec{w, b, r}, scorer,
                                MakeConfig(beam_size, mode, std::nullopt));
        },
        py::arg("scorer"), py::arg("tokens"), py::arg("w") = 40, py::arg("b") = 10,
        py::arg("r") = 5, py::arg("beam_size") = 4, py::arg("mode") = "fst");

  // Evaluation.
  py::class_<Prf>(m, "Prf")
      .def_readonly("precision", &Prf::precision)
      .def_readonly("recall", &Prf::recall)
      .def_readonly("f1", &Prf::f1)
      .def("__iter__", [](const Prf& p) {
        return py::iter(py::make_tuple(p.precision, p.recall, p.f1));
      })
      .def("__repr__", [](const Prf& p) {
        return "Prf(precision=" + std::to_string(p.precision) +
               ", recall=" + std::to_string(p.recall) + ", f1=" + std::to_string(p.f1) + ")";
      });
  m.def("boundary_prf", &BoundaryPrf, py::arg("pred"), py::arg("gold"));
  m.def("micro_prf", [](const std::vector<Segmentation>& pred,
                        const std::vector<Segmentation>& gold, const std::string& unit) {
    return MicroPrf(pred, gold, ParseUnit(unit));
  }, py::arg("pred"), py::arg("gold"), py::arg("unit") = "boundary");
  m.def("macro_prf", [](const std::vector<Segmentation>& pred,
                        const std::vector<Segmentation>& gold, const std::string& unit) {
    return MacroPrf(pred, gold, ParseUnit(unit));
  }, py::arg("pred"), py::arg("gold"), py::arg("unit") = "boundary");
  m.def("fixed_length_segment", &FixedLengthSegment, py::arg("n"),
        py::arg("segment_length"));
  m.def("oracle_segment",
        [](const Words& reference, const Words& asr, const std::set<std::string>& abbrev) {
          OracleOptions opt;
          opt.abbreviations = abbrev;
          return OracleSegment(reference, asr, opt);
        },
        py::arg("reference"), py::arg("asr"),
        py::arg("abbreviations") = std::set<std::string>{});
  m.def("reference_segmentation", [](const Words& reference) {
    DelimitedText d = ReferenceSegmentation(reference);
    return py::make_tuple(d.tokens, d.segmentation);
  }, py::arg("reference"));
  m.def("wellformed_rate", [](const std::vector<bool>& flags) {
    std::unique_ptr<bool[]> buf(new bool[flags.size()]);
    std::copy(flags.begin(), flags.end(), buf.get());
    return WellformedRate(std::span<const bool>(buf.get(), flags.size()));
  }, py::arg("flags"));
  py::class_<LengthHistogram>(m, "LengthHistogram")
      .def(py::init<size_t, size_t>(), py::arg("bin_width") = 10,
           py::arg("overflow_from") = 50)
      .def("add", &LengthHistogram::Add, py::arg("segmentation"))
      .def("add_length", &LengthHistogram::AddLength, py::arg("length"))
      .def_property_readonly("counts", &LengthHistogram::counts)
      .def_property_readonly("total", &LengthHistogram::total)
      .def_property_readonly("labels", [](const LengthHistogram& h) {
        Words out;
        for (size_t b = 0; b < h.num_bins(); ++b) out.push_back(h.BinLabel(b));
        return out;
      });
  m.def("evaluate",
        [](const std::vector<Segmentation>& pred, const std::vector<Segmentation>& gold,
           const std::vector<bool>& wellformed, const std::string& unit) {
          std::unique_ptr<bool[]> buf(new bool[wellformed.size()]);
          std::copy(wellformed.begin(), wellformed.end(), buf.get());
          EvalReport r = Evaluate(pred, gold,
                                  std::span<const bool>(buf.get(), wellformed.size()),
                                  ParseUnit(unit));
          return r.ToJson();
        },
        py::arg("pred"), py::arg("gold"), py::arg("wellformed") = std::vector<bool>{},
        py::arg("unit") = "boundary",
        "Corpus report as a JSON string.");
}
