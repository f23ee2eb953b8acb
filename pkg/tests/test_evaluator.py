from __future__ import annotations

import itertools
import re

import pytest

from fakes import ScriptedBackend
from gecforge.backend import FatalError, MockBackend
from gecforge.core import UNTESTED, ErrorCategory, GenerationRecord, PromptSpec, SentencePair, SubjectType, TokenUsage
from gecforge.evaluator import (
    DEFAULT_CRITERIA,
    JUDGE,
    RULE,
    CriterionSpec,
    Evaluator,
    JudgeParseError,
    check_subject,
    evaluate,
    judge_criterion,
    parse_judge_reply,
    pattern_anchors,
    validate_criteria,
)


def record(wrong, right, category=ErrorCategory.VERB, subject="car", pattern=None,
           stype=SubjectType.CONCRETE_NOUN):
    return GenerationRecord("r", PromptSpec(subject, stype, category, pattern), SentencePair(wrong, right))


CAR = record("The car swims to the shore.", "The car drives to the shore.",
             pattern="use the swim verb correctly")
GOOD = record("The car drive to the shore every day.", "The car drives to the shore every day.",
              category=ErrorCategory.VERB_SVA, pattern="drive")


def test_parse_judge_reply():
    assert parse_judge_reply("YES\nLooks fine.") == (True, "Looks fine.")
    assert parse_judge_reply("  no, the subject changed") == (False, "the subject changed")
    assert parse_judge_reply("Yes.") == (True, "")
    assert parse_judge_reply("**NO** wrong tense") == (False, "wrong tense")
    for bad in ("Maybe, hard to say", "", "I think YES"):
        with pytest.raises(JudgeParseError):
            parse_judge_reply(bad)


def test_c3_subject_match():
    r = record("The car go fast.", "The car goes fast.", category=ErrorCategory.VERB_SVA)
    ok, why = check_subject(r)
    assert ok and "The car" in why


def test_c3_subject_mismatch():
    r = record("The car go fast.", "The bus goes fast.", category=ErrorCategory.VERB_SVA)
    assert not check_subject(r)[0]
    r = record("Buses go fast.", "Buses goes fast.", category=ErrorCategory.VERB_SVA)
    assert not check_subject(r)[0]


def test_car_swims_rejected_under_c2(lexicon):
    judge = MockBackend(judge_answer="YES")
    v = Evaluator(judge, lexicon=lexicon).evaluate(CAR).verdict
    assert (v.c1, v.c2, v.accepted, v.failed_criterion) == (False, False, False, 2)
    assert v.rationales[2] == UNTESTED and v.rationales[3] == UNTESTED
    assert "swim" in v.rationales[1]
    assert judge.calls == 0
    ok, why = judge_criterion(CAR, DEFAULT_CRITERIA[1], judge, lexicon)
    assert not ok


@pytest.mark.parametrize("pattern", [None, "swim"])
def test_car_swims_pattern_variants(pattern, lexicon):
    r = record(CAR.pair.wrong, CAR.pair.right, pattern=pattern)
    v = Evaluator(MockBackend(), lexicon=lexicon).evaluate(r).verdict
    if pattern is None:
        # without a pattern a lexical verb swap is a valid VERB pair
        assert v.accepted
    else:
        assert v.failed_criterion == 2


def test_all_true_accepted(lexicon):
    judge = MockBackend()
    ev = Evaluator(judge, lexicon=lexicon).evaluate(GOOD)
    assert ev.verdict.accepted and ev.verdict.failed_criterion is None
    assert judge.calls == 2  # C1 confirmation and C4
    assert [e.category for e in ev.edits] == [ErrorCategory.VERB_SVA]
    assert ev.usage.tokens_in > 0


def test_c3_failure_rejects(lexicon):
    r = record("The car drive to the shore.", "A car drives to the shore.", category=ErrorCategory.VERB_SVA)
    v = Evaluator(MockBackend(), lexicon=lexicon).evaluate(r).verdict
    assert not v.accepted
    assert v.failed_criterion in (2, 3)


def test_c1_failure_when_category_missing(lexicon):
    r = record("The car drive to the shore.", "The car drives to the shore.", category=ErrorCategory.DET)
    v = Evaluator(MockBackend(), lexicon=lexicon).evaluate(r).verdict
    assert v.failed_criterion == 1
    assert "no DET edit" in v.rationales[0]


def test_judge_no_on_c4(lexicon):
    judge = ScriptedBackend(lambda p: "NO\nchanges meaning" if "Criterion C4" in p else "YES\nfine")
    v = Evaluator(judge, lexicon=lexicon).evaluate(GOOD).verdict
    assert v.criteria == (True, True, True, False)
    assert v.failed_criterion == 4 and not v.accepted
    assert v.rationales[3] == "judge: changes meaning"


def test_judge_no_on_c1_skips_c4(lexicon):
    judge = ScriptedBackend(lambda p: "NO\nnope")
    v = Evaluator(judge, lexicon=lexicon).evaluate(GOOD).verdict
    assert v.criteria == (False, True, True, False)
    assert v.failed_criterion == 1
    assert v.rationales[3] == UNTESTED
    assert len(judge.prompts) == 1


def test_unparseable_judge_reply(lexicon):
    with pytest.raises(JudgeParseError):
        Evaluator(ScriptedBackend(["Maybe, hard to say"]), lexicon=lexicon).evaluate(GOOD)


def test_backend_error_propagates(lexicon):
    with pytest.raises(FatalError):
        Evaluator(ScriptedBackend([FatalError("401")]), lexicon=lexicon).evaluate(GOOD)


def _judge_only():
    return tuple(CriterionSpec(i, f"c{i}", JUDGE, f"question {i}") for i in (1, 2, 3, 4))


def test_truth_table_through_evaluator(lexicon):
    for combo in itertools.product((False, True), repeat=4):
        def reply(prompt, combo=combo):
            n = int(re.search(r"Criterion C(\d)", prompt).group(1))
            return "YES" if combo[n - 1] else "NO"
        judge = ScriptedBackend(reply)
        v = Evaluator(judge, _judge_only(), lexicon).evaluate(GOOD).verdict
        assert v.accepted == all(combo)
        first_false = next((i + 1 for i, c in enumerate(combo) if not c), None)
        assert v.failed_criterion == first_false
        # short circuit: nothing after the first failure is asked
        assert len(judge.prompts) == (first_false or 4)
        for i in range(4):
            if first_false is not None and i + 1 > first_false:
                assert v.criteria[i] is False and v.rationales[i] == UNTESTED


def test_evaluate_attaches_verdict_and_usage(lexicon):
    r = GOOD.__class__(**{**GOOD.__dict__, "usage": TokenUsage(10, 5)})
    out = evaluate(r, MockBackend(), lexicon=lexicon)
    assert out.verdict.accepted
    assert out.edits and all(e.category is ErrorCategory.VERB_SVA for e in out.edits)
    assert out.usage.tokens_in > 10 and out.usage.tokens_out > 5


def test_evaluate_needs_pair(lexicon):
    r = GenerationRecord("x", GOOD.spec, None)
    with pytest.raises(ValueError):
        Evaluator(MockBackend(), lexicon=lexicon).evaluate(r)


def test_validate_criteria():
    validate_criteria(DEFAULT_CRITERIA)
    with pytest.raises(ValueError):
        validate_criteria(DEFAULT_CRITERIA[:3])
    with pytest.raises(ValueError):
        validate_criteria(DEFAULT_CRITERIA[:3] + (CriterionSpec(3, "dup", RULE, "q"),))
    with pytest.raises(ValueError):
        validate_criteria(DEFAULT_CRITERIA[:3] + (CriterionSpec(4, "x", "oracle", "q"),))


@pytest.mark.parametrize("pattern,anchors", [
    (None, []),
    ("swim", ["swim"]),
    ("use the swim verb correctly", ["swim"]),
    ("Neither...nor", ["Neither", "nor"]),
    ('comma before "but"', ["but"]),
    ("past tense", []),
    ("subject-verb agreement with collective nouns in formal written English", []),
])
def test_pattern_anchors(pattern, anchors):
    assert pattern_anchors(pattern) == anchors


def test_judge_criterion_modes(lexicon):
    yes = MockBackend()
    assert judge_criterion(GOOD, DEFAULT_CRITERIA[0], yes, lexicon)[0]
    assert judge_criterion(GOOD, DEFAULT_CRITERIA[3], yes, lexicon)[0]
    no = ScriptedBackend(["NO\nbad"])
    ok, why = judge_criterion(GOOD, DEFAULT_CRITERIA[0], no, lexicon)
    assert not ok and "judge: bad" in why
