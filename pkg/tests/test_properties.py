from __future__ import annotations

import json
import math
from collections import Counter

import httpx
import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from gecforge.analyzer import align, alignment_cost, annotate, merge_edits, substitution_cost, tokenize_words
from gecforge.backend import CompletionRequest, HttpBackend, PriceTable, RateLimitedError, RetryPolicy, estimate_cost
from gecforge.core import (
    ALL_CATEGORIES,
    ALL_SUBJECT_TYPES,
    GENERABLE_CATEGORIES,
    NON_DIVERSIFIED,
    Edit,
    GenerationRecord,
    PromptSpec,
    SentencePair,
    SubjectType,
    TokenUsage,
    Verdict,
    apply_edits,
    parse_category,
    validate_pair,
)
from gecforge.metrics import distribution, f_beta, score_edits
from gecforge.prompting import parse_completion
from gecforge.selectors import job_rng, parse_candidates, select_category, select_subject_type
from gecforge.store import CELLS, Ledger, M2Entry, dumps_record, format_m2, next_stratum, parse_m2, record_from_dict
from oracles.alignment import dijkstra_cost

categories = st.sampled_from(ALL_CATEGORIES)
generable = st.sampled_from(GENERABLE_CATEGORIES)
subject_types = st.sampled_from(ALL_SUBJECT_TYPES)
words = st.sampled_from(["cat", "Cat", "cats", "dog", "the", "a", "run", "runs", "ran", ",", "."])
counts = st.integers(0, 500)


@given(categories)
def test_category_label_round_trip(cat):
    assert parse_category(cat.label) is cat
    assert parse_category("R:" + cat.label) is cat
    assert parse_category(cat.label.lower()) is cat


@given(subject_types)
def test_subject_type_round_trip(t):
    assert SubjectType.parse(t.label) is t


@given(st.lists(st.booleans(), min_size=4, max_size=4))
def test_verdict_is_conjunction(flags):
    assert Verdict(*flags).accepted == all(flags)


sentence_text = st.text(alphabet=st.characters(whitelist_categories=("Ll", "Lu")), min_size=1, max_size=12).map(
    lambda w: f"The {w} sat here.")
prose = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc")), max_size=40).filter(
    lambda s: ":" not in s)


@given(sentence_text, sentence_text, prose, prose)
def test_parse_completion_ignores_surrounding_prose(wrong, right, before, after):
    assume(wrong != right)
    raw = f"{before}\nWrong: {wrong}\nRight: {right}\n{after}"
    assert parse_completion(raw) == SentencePair(wrong, right)


@given(st.lists(words, max_size=8), st.lists(words, max_size=8))
@settings(max_examples=300)
def test_alignment_matches_oracle_and_rebuilds_target(src, tgt):
    ops = align(src, tgt)
    assert alignment_cost(ops, src, tgt) == pytest.approx(dijkstra_cost(src, tgt, substitution_cost))
    edits = merge_edits(ops, src, tgt)
    assert apply_edits(src, edits) == tgt
    assert all(a.end <= b.start for a, b in zip(edits, edits[1:]))


word_text = st.lists(st.sampled_from(["She", "she", "go", "goes", "to", "school", "a", "an", "apple",
                                      "quick", "quickly", "big", "bigger", ",", "the"]), min_size=1, max_size=7)


@given(a=word_text, b=word_text)
@settings(max_examples=200, suppress_health_check=[HealthCheck.too_slow])
def test_annotate_round_trip(a, b, lexicon):
    pair = SentencePair(" ".join(a) + " .", " ".join(b) + " .")
    edits = annotate(pair, lexicon)
    assert apply_edits(tokenize_words(pair.wrong), edits) == tokenize_words(pair.right)
    assert all(e.category is not None for e in edits)
    if a == b:
        assert edits == []


@given(counts, counts, counts, counts)
def test_f_beta_monotone_in_tp(tp, fp, fn, extra):
    assume(tp + fp > 0 and tp + fn > 0)
    assert f_beta(tp + extra, fp, fn).f_half >= f_beta(tp, fp, fn).f_half - 1e-12


@given(counts, counts, counts)
def test_f1_is_harmonic_mean(tp, fp, fn):
    s = f_beta(tp, fp, fn, beta=1.0)
    p, r = s.precision, s.recall
    expect = 2 * p * r / (p + r) if p + r else 0.0
    assert s.f_half == pytest.approx(expect)


edit_pool = st.sampled_from([Edit(s, s + d, r, c) for s in range(3) for d in (0, 1) for r in ("x", "")
                             for c in ALL_CATEGORIES[:3] if d or r])


@given(st.lists(st.tuples(st.lists(edit_pool, max_size=3), st.lists(edit_pool, max_size=3)), max_size=6))
def test_swapping_hyp_and_gold_swaps_p_and_r(rows):
    hyp, gold = [h for h, _ in rows], [g for _, g in rows]
    a, b = score_edits(hyp, gold), score_edits(gold, hyp)
    assert (a.precision, a.recall) == (b.recall, b.precision)
    assert (a.fp, a.fn) == (b.fn, b.fp)


@given(st.lists(categories, min_size=1, max_size=200))
def test_distribution_properties(cats):
    rep = distribution(cats)
    assert sum(rep.percentages.values()) == pytest.approx(100.0)
    assert rep.n_edits == len(cats)
    nonzero = len(set(cats))
    assert -1e-12 <= rep.entropy_nats <= math.log(nonzero) + 1e-9


@given(st.dictionaries(st.sampled_from(CELLS), st.integers(0, 3), max_size=60), st.integers(0, 3))
def test_next_stratum_is_first_argmin(filled, quota):
    ledger = Ledger(accepted=filled)
    open_cells = [c for c in CELLS if filled.get(c, 0) < quota]
    got = next_stratum(ledger, quota)
    if not open_cells:
        assert got is None
    else:
        lowest = min(filled.get(c, 0) for c in open_cells)
        assert got == next(c for c in open_cells if filled.get(c, 0) == lowest)


safe_text = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=30)


@st.composite
def records(draw):
    cat = draw(generable)
    pattern = None if cat in NON_DIVERSIFIED else draw(st.none() | safe_text)
    spec = PromptSpec(draw(safe_text), draw(subject_types), cat, pattern,
                      tuple(draw(st.lists(st.integers(0, 10**6), max_size=2))))
    pair = draw(st.none() | st.builds(SentencePair, safe_text, safe_text))
    verdict = draw(st.none() | st.builds(Verdict, st.booleans(), st.booleans(), st.booleans(), st.booleans(),
                                         st.tuples(safe_text, safe_text, safe_text, safe_text),
                                         st.none() | st.integers(0, 4)))
    edits = tuple(draw(st.lists(edit_pool, max_size=3)))
    usage = TokenUsage(draw(counts), draw(counts))
    return GenerationRecord(draw(safe_text), spec, pair, verdict, edits, usage, draw(safe_text),
                            draw(st.none() | safe_text))


@given(records())
def test_record_json_round_trip(rec):
    assert record_from_dict(json.loads(dumps_record(rec))) == rec
    assert "\n" not in dumps_record(rec)


m2_token = st.text(alphabet=st.characters(whitelist_categories=("L", "N", "P")), min_size=1, max_size=6).filter(
    lambda t: "|||" not in t)


@st.composite
def m2_entries(draw):
    tokens = draw(st.lists(m2_token, min_size=1, max_size=8))
    edits, pos = [], 0
    while pos <= len(tokens) and draw(st.booleans()):
        start = draw(st.integers(pos, len(tokens)))
        end = draw(st.integers(start, min(len(tokens), start + 2)))
        repl = " ".join(draw(st.lists(m2_token, min_size=0 if end > start else 1, max_size=2)))
        edits.append(Edit(start, end, repl, draw(categories)))
        pos = end + 1
    return M2Entry(tuple(tokens), tuple(edits))


@given(st.lists(m2_entries(), max_size=5))
def test_m2_round_trip(entries):
    text = format_m2(entries)
    assert parse_m2(text) == entries
    assert format_m2(parse_m2(text)) == text


@given(st.lists(st.tuples(counts, counts), max_size=10),
       st.floats(0, 100, allow_nan=False), st.floats(0, 100, allow_nan=False))
def test_cost_is_additive(usages, pin, pout):
    prices = PriceTable(pin, pout)
    parts = [TokenUsage(a, b) for a, b in usages]
    total = TokenUsage.total(parts)
    assert estimate_cost(total, prices) == pytest.approx(sum(estimate_cost(u, prices) for u in parts), abs=1e-9)


@given(st.integers(0, 6))
@settings(max_examples=15, deadline=None)
def test_retry_attempts_bounded(max_retries):
    hits = []

    def handler(request):
        hits.append(request)
        return httpx.Response(429, text="slow down")

    sleeps = []
    backend = HttpBackend(api_key="k", base_url="http://stub", retry=RetryPolicy(max_retries=max_retries),
                          sleep=sleeps.append, jitter_seed=1, client=httpx.Client(transport=httpx.MockTransport(handler)))
    with pytest.raises(RateLimitedError):
        backend.complete(CompletionRequest("hi"))
    assert len(hits) == 1 + max_retries == backend.calls
    assert len(sleeps) == max_retries
    assert all(0 <= s <= 32 for s in sleeps)


@given(st.integers(0, 2**32), st.integers(0, 10**6))
def test_selectors_draw_members(seed, job):
    rng = job_rng(seed, job)
    assert select_subject_type(rng) in ALL_SUBJECT_TYPES
    assert select_category(rng) in GENERABLE_CATEGORIES
    a, b = job_rng(seed, job), job_rng(seed, job)
    assert select_category(a) is select_category(b)


@given(st.dictionaries(generable, st.floats(0.01, 10), min_size=1), st.integers(0, 1000))
def test_weighted_selection_stays_in_support(weights, seed):
    rng = np.random.default_rng(seed)
    drawn = Counter(select_category(rng, weights) for _ in range(20))
    assert set(drawn) <= set(weights)


@given(st.lists(st.text(alphabet=st.characters(whitelist_categories=("L",)), min_size=2, max_size=10),
                min_size=1, max_size=10))
def test_parse_candidates_numbered_list(items):
    text = "\n".join(f"{i}. {w}" for i, w in enumerate(items, 1))
    assert parse_candidates(text) == items


@given(sentence_text)
def test_identical_sides_invalid(text):
    assert "identical sides" in validate_pair(SentencePair(text, text))
