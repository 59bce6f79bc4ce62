import json
import math
import os
import shlex

import pytest

import segfst


def test_window_plan():
    plan = segfst.make_windows(100, 40, 10, 5)
    assert [(s.span_begin, s.span_end) for s in plan] == [(0, 40), (30, 70), (60, 100)]
    assert [(s.adopt_begin, s.adopt_end) for s in plan] == [(0, 35), (35, 65), (65, 100)]
    with pytest.raises(segfst.SegfstError) as err:
        segfst.make_windows(10, 40, 10, 20)
    assert err.value.code == "InvalidSpec"


def test_constraint_output_space():
    words = "i came i saw i conquered".split()
    c = segfst.compile_window_constraint(words)
    assert c.count_paths() == 32
    assert c.is_deterministic()
    assert c.num_states == 12
    assert c.accepts("i came <SENT> i saw i conquered".split())
    assert not c.accepts("<SENT> i came i saw i conquered".split())
    composed = segfst.compile_window_constraint(words, by_composition=True)
    assert composed.to_text() == c.to_text()
    bio = segfst.bio_constraint(["np"], length=3)
    assert bio.count_paths() == 13


def test_parse_and_repair():
    seg = segfst.parse_segmentation(
        "i am hungry <SENT> i am sleepy".split(), "i am hungry i am sleepy".split())
    assert seg.boundaries == [3]
    assert seg.render("i am hungry i am sleepy".split())[3] == segfst.DELIMITER
    with pytest.raises(segfst.NotWellformedError) as err:
        segfst.parse_segmentation("i <SENT> <SENT> am".split(), ["i", "am"])
    assert err.value.reason == "double-delimiter"
    assert isinstance(err.value, segfst.SegfstError)

    repaired = segfst.repair_output(
        "i am hungry <SENT> well i am sleepy".split(), "i am hungry i am sleepy".split())
    assert repaired == segfst.Segmentation(6, [3])


def test_alignment():
    path = segfst.levenshtein_align(["the", "cat", "sat"], ["the", "cats", "sat"])
    assert path.cost == 1
    assert path.ops == [("match", 0, 0), ("substitute", 1, 1), ("match", 2, 2)]
    ins = segfst.levenshtein_align([], ["a"])
    assert ins.ops == [("insert", None, 0)]
    ref = "this train leaves at four the next train".split()
    asr = "this train leaves at for the next train".split()
    out = segfst.project_boundaries(
        segfst.Segmentation(8, [5]), segfst.levenshtein_align(ref, asr), len(asr))
    assert asr[out.boundaries[0]] == "the"


def test_ngram(tmp_path):
    k = 0.1
    model = segfst.NgramModel.train([["a", "<SENT>", "b"]], order=1, k=k, end_marker=False)
    p = math.exp(model.log_prob([], "<SENT>", ["a", "b", "<SENT>"]))
    assert p == pytest.approx((1 + k) / (3 + 3 * k), rel=1e-12)
    path = str(tmp_path / "m.json")
    model.save(path)
    assert segfst.NgramModel.load(path) == model
    with pytest.raises(segfst.SegfstError):
        segfst.NgramModel.train([], order=3)


def test_decoding_modes():
    window = "i am hungry i am sleepy".split()
    copy = segfst.decode_window(segfst.CopyScorer(), window)
    assert copy.generated == window and copy.wellformed
    hal = segfst.HallucinateScorer()
    free = segfst.decode_window(hal, window, beam_size=1, mode="none")
    assert not free.wellformed and free.segmentation is None
    fixed = segfst.decode_window(hal, window, beam_size=1, mode="fst")
    assert fixed.wellformed
    assert [w for w in fixed.generated if w != segfst.DELIMITER] == window
    repaired = segfst.decode_window(hal, window, mode="repair")
    assert repaired.segmentation.length == len(window)


class BeforeI(segfst.PythonScorer):
    """Copies the window, asking for a delimiter before every non-initial 'i'."""

    def score_next(self, window, prefix, candidates):
        emitted = [w for w in prefix if w != "<SENT>"]
        nxt = window[len(emitted)] if len(emitted) < len(window) else "</s>"
        want_break = nxt == "i" and emitted and prefix[-1] != "<SENT>"
        out = []
        for c in candidates:
            if c == "<SENT>":
                out.append(0.0 if want_break else -5.0)
            elif c == nxt:
                out.append(-5.0 if want_break else 0.0)
            else:
                out.append(-1e9)
        return out


def test_python_scorer_and_long_form():
    tokens = ("i am hungry " * 30).split()
    result = segfst.segment_passage(BeforeI(), tokens, w=40, b=10, r=5, beam_size=2)
    assert result.segmentation.boundaries == list(range(3, 90, 3))
    assert len(result.plan) == 3
    assert all(w.wellformed for w in result.windows)
    scores = BeforeI().score_next(["i", "am"], ["i"], ["am", "<SENT>"])
    assert scores == [0.0, -5.0]


def test_metrics():
    prf = segfst.boundary_prf(segfst.Segmentation(10, [3, 7]), segfst.Segmentation(10, [3, 8]))
    assert tuple(prf) == pytest.approx((0.5, 0.5, 0.5))
    gold = [segfst.Segmentation(100, [10, 20, 30, 40]), segfst.Segmentation(10, [5])]
    pred = [segfst.Segmentation(100, [10, 20, 30, 40]), segfst.Segmentation(10, [3])]
    assert segfst.micro_prf(pred, gold).f1 == pytest.approx(0.8)
    assert segfst.macro_prf(pred, gold).f1 == pytest.approx(0.5)
    assert segfst.fixed_length_segment(10, 4).boundaries == [4, 8]
    assert segfst.wellformed_rate([True, False, True, True]) == 0.75
    report = json.loads(segfst.evaluate(pred, gold, [True, True]))
    assert report["f1"] == pytest.approx(0.8)
    hist = segfst.LengthHistogram()
    hist.add(segfst.Segmentation(10, [4, 8]))
    assert hist.counts[0] == 3 and hist.labels[-1] == "50+"


def test_oracle():
    ref = "This train leaves at four. The next train".split()
    asr = "this train leaves at for the next train".split()
    assert segfst.oracle_segment(ref, asr).boundaries == [5]
    tokens, seg = segfst.reference_segmentation(ref)
    assert segfst.oracle_segment(ref, tokens) == seg
    assert segfst.oracle_segment("At St. John today.".split(), "at st john today".split(),
                                 abbreviations={"st."}).boundaries == []


@pytest.mark.skipif("SEGFST_CLI" not in os.environ, reason="command-line tool not built")
def test_external_loopback_matches_in_process():
    cli = shlex.quote(os.environ["SEGFST_CLI"])
    remote = segfst.ExternalScorer(f"{cli} serve-mock --policy random --seed 5")
    local = segfst.RandomScorer(5)
    window = "a b c a b d e".split()
    for mode in ("fst", "none"):
        a = segfst.decode_window(remote, window, mode=mode)
        b = segfst.decode_window(local, window, mode=mode)
        assert a.generated == b.generated and a.score == b.score
    broken = segfst.ExternalScorer("read l; echo nonsense; cat >/dev/null")
    with pytest.raises(segfst.SegfstError) as err:
        segfst.decode_window(broken, window)
    assert err.value.code == "ScorerUnavailable"
