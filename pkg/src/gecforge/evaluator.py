"""Four-criterion quality gate; a pair is kept only if all four hold.

Rule checks run first because they are free; judge calls are made only
while every earlier check has passed. Criteria that were never evaluated
are recorded as false with the ``UNTESTED`` rationale.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .analyzer import Lexicon, annotate, load_lexicon, tokenize_words
from .analyzer.lexicon import stems
from .backend import Backend, CompletionRequest, JUDGE_TEMPERATURE
from .core import UNTESTED, Edit, GecForgeError, GenerationRecord, TokenUsage, Verdict
from .prompting import build_judge_prompt

RULE, JUDGE, HYBRID = "rule", "judge", "hybrid"

# The subject noun phrase must end within this many tokens of the start.
SUBJECT_WINDOW = 6


class JudgeParseError(GecForgeError, ValueError):
    pass


@dataclass(frozen=True)
class CriterionSpec:
    id: int
    name: str
    mode: str
    question: str


DEFAULT_CRITERIA: tuple[CriterionSpec, ...] = (
    CriterionSpec(1, "target error present", HYBRID,
                  "Does the wrong sentence contain a {category_name} ({category}) error?"),
    CriterionSpec(2, "minimal pair", RULE,
                  "Is the {category} error the only difference between the two sentences, "
                  "with every other word kept the same?"),
    CriterionSpec(3, "subject preserved", RULE,
                  "Do both sentences begin with the same subject noun phrase, built on \"{subject}\"?"),
    CriterionSpec(4, "grammatical and faithful", JUDGE,
                  "Is the right sentence fully grammatical, and does it keep the meaning of the wrong sentence?"),
)


def validate_criteria(criteria: Sequence[CriterionSpec]) -> None:
    ids = sorted(c.id for c in criteria)
    if ids != [1, 2, 3, 4]:
        raise ValueError(f"criteria must define ids 1..4 exactly once, got {ids}")
    for c in criteria:
        if c.mode not in (RULE, JUDGE, HYBRID):
            raise ValueError(f"criterion {c.id}: unknown mode {c.mode!r}")


def parse_judge_reply(text: str) -> tuple[bool, str]:
    """First whitespace token must be YES or NO; the rest is the rationale."""
    stripped = text.strip()
    parts = stripped.split(None, 1)
    head = re.sub(r"[^\w]", "", parts[0]).upper() if parts else ""
    if head not in ("YES", "NO"):
        raise JudgeParseError(f"judge reply does not start with YES or NO: {stripped[:60]!r}")
    rationale = parts[1].strip() if len(parts) > 1 else ""
    return head == "YES", " ".join(rationale.split())


# rule checks ---------------------------------------------------------------


def _lemmas(word: str, lex: Lexicon) -> set[str]:
    w = word.lower()
    out = {w} | stems(w) | set(lex.verb_lemmas(w))
    sing = lex.singular_of(w)
    if sing:
        out.add(sing)
    return out


_GRAMMAR_TERMS = frozenset(
    """verb verbs noun nouns adjective adjectives adverb adverbs tense tenses form forms agreement
    subject subject-verb object plural singular past present future perfect continuous progressive
    participle gerund infinitive article articles determiner determiners preposition prepositions
    pronoun pronouns conjunction conjunctions particle particles comparative superlative possessive
    clause clauses phrase phrases pattern patterns error errors usage word words order spelling
    punctuation comma commas contraction contractions inflection collective countable uncountable
    modal modals auxiliary passive active voice construction correlative coordinating subordinating
    irregular regular sentence mood conditional relative reflexive number""".split()
)
_INSTRUCTION_WORDS = frozenset("use using used correctly properly correct incorrect the a an of with".split())
_QUOTED = re.compile(r"[\"“]([^\"”]+)[\"”]|(?<!\w)'([^']+)'(?!\w)")


def pattern_anchors(pattern: Optional[str]) -> list[str]:
    """Words a pattern obliges the right sentence to contain.

    Quoted fragments are anchors if present. Otherwise the pattern's words
    minus grammar terminology ("verb", "tense") are anchors; instruction
    words ("use", "correctly") are dropped from longer patterns. A pattern
    that still has more than three words is descriptive and anchors nothing.
    """
    if not pattern:
        return []
    quoted = [a or b for a, b in _QUOTED.findall(pattern)]
    if quoted:
        return [t for t in tokenize_words(" ".join(quoted)) if any(ch.isalnum() for ch in t)]
    source = pattern.replace("...", " ").replace("…", " ")
    words = [t for t in tokenize_words(source) if any(ch.isalnum() for ch in t)]
    long_form = len(words) > 3
    words = [w for w in words if w.lower() not in _GRAMMAR_TERMS]
    if long_form:
        words = [w for w in words if w.lower() not in _INSTRUCTION_WORDS]
    return words if len(words) <= 3 else []


def check_edit_category(record: GenerationRecord, edits: Sequence[Edit]) -> tuple[bool, str]:
    want = record.spec.category
    hits = [e for e in edits if e.category is want]
    if not hits:
        found = ", ".join(sorted({e.category.label for e in edits})) or "no edits"
        return False, f"no {want.label} edit found (analyzer: {found})"
    return True, f"{len(hits)} {want.label} edit(s) found"


def check_minimal_pair(record: GenerationRecord, edits: Sequence[Edit], lex: Lexicon) -> tuple[bool, str]:
    want = record.spec.category
    if not edits:
        return False, "sentences do not differ"
    stray = [e for e in edits if e.category is not want]
    if stray:
        labels = ", ".join(f"{e.category.label}@{e.start}" for e in stray)
        return False, f"edits outside {want.label}: {labels}"
    anchors = pattern_anchors(record.spec.pattern)
    if anchors:
        right = set()
        for tok in tokenize_words(record.pair.right):
            right |= _lemmas(tok, lex)
        missing = [a for a in anchors if not (_lemmas(a, lex) & right)]
        if missing:
            return False, f"pattern {record.spec.pattern!r} not used in the right sentence (missing {missing})"
    return True, f"all {len(edits)} edit(s) are {want.label}"


def check_subject(record: GenerationRecord) -> tuple[bool, str]:
    subject = [t.lower() for t in tokenize_words(record.spec.subject)]
    wrong = tokenize_words(record.pair.wrong)
    right = tokenize_words(record.pair.right)
    if not subject:
        return False, "empty subject"
    low = [t.lower() for t in wrong]
    k = len(subject)
    for i in range(0, min(SUBJECT_WINDOW, len(low)) - k + 1):
        if low[i:i + k] == subject:
            end = i + k
            if wrong[:end] == right[:end]:
                return True, f"both sentences open with {' '.join(wrong[:end])!r}"
            return False, f"subject phrase differs: {' '.join(wrong[:end])!r} vs {' '.join(right[:end])!r}"
    return False, f"subject {record.spec.subject!r} not found at the start of the wrong sentence"


# evaluation ----------------------------------------------------------------


@dataclass(frozen=True)
class Evaluation:
    verdict: Verdict
    edits: tuple[Edit, ...]
    usage: TokenUsage


class Evaluator:
    def __init__(self, judge: Backend, criteria: Sequence[CriterionSpec] = DEFAULT_CRITERIA,
                 lexicon: Optional[Lexicon] = None):
        validate_criteria(criteria)
        self.judge = judge
        self.criteria = {c.id: c for c in criteria}
        self.lexicon = lexicon or load_lexicon()

    def _ask(self, record: GenerationRecord, spec: CriterionSpec) -> tuple[bool, str, TokenUsage]:
        prompt = build_judge_prompt(record, spec.id, question=spec.question)
        reply = self.judge.complete(CompletionRequest(prompt, temperature=JUDGE_TEMPERATURE, max_tokens=64))
        ok, why = parse_judge_reply(reply.text)
        return ok, f"judge: {why}" if why else "judge", reply.usage

    def _rule(self, record: GenerationRecord, cid: int, edits: Sequence[Edit]) -> tuple[bool, str]:
        if cid == 1:
            return check_edit_category(record, edits)
        if cid == 2:
            return check_minimal_pair(record, edits, self.lexicon)
        if cid == 3:
            return check_subject(record)
        return True, "no rule check"

    def evaluate(self, record: GenerationRecord) -> Evaluation:
        """Rule and hybrid-rule checks first (ids ascending), then judge calls."""
        if record.pair is None:
            raise ValueError("record has no sentence pair")
        edits = tuple(annotate(record.pair, self.lexicon))
        results: dict[int, bool] = {}
        why: dict[int, str] = {}
        usage = TokenUsage()
        failed: Optional[int] = None
        for cid in sorted(self.criteria):
            spec = self.criteria[cid]
            if spec.mode == JUDGE:
                continue
            ok, reason = self._rule(record, cid, edits)
            if not ok:
                results[cid], why[cid], failed = False, reason, cid
                break
            why[cid] = reason
        if failed is None:
            # rule-only criteria are settled; only judge and hybrid ones remain
            for cid, spec in self.criteria.items():
                if spec.mode == RULE:
                    results[cid] = True
            for cid in sorted(self.criteria):
                spec = self.criteria[cid]
                if spec.mode == RULE:
                    continue
                ok, reason, used = self._ask(record, spec)
                usage = usage + used
                why[cid] = f"{why[cid]}; {reason}" if cid in why else reason
                results[cid] = ok
                if not ok:
                    failed = cid
                    break
        values = [results.get(i, False) for i in (1, 2, 3, 4)]
        rationales = tuple(why[i] if i in results else UNTESTED for i in (1, 2, 3, 4))
        verdict = Verdict(*values, rationales=rationales, failed_criterion=failed)
        return Evaluation(verdict, edits, usage)

    def apply(self, record: GenerationRecord) -> GenerationRecord:
        ev = self.evaluate(record)
        return replace(record, verdict=ev.verdict, edits=ev.edits, usage=record.usage + ev.usage)


def judge_criterion(record: GenerationRecord, spec: CriterionSpec, judge_backend: Backend,
                    lexicon: Optional[Lexicon] = None) -> tuple[bool, str]:
    """Evaluate one criterion on its own, per its mode."""
    ev = Evaluator(judge_backend, tuple(DEFAULT_CRITERIA[i - 1] if i != spec.id else spec for i in (1, 2, 3, 4)),
                   lexicon)
    edits = tuple(annotate(record.pair, ev.lexicon))
    if spec.mode in (RULE, HYBRID):
        ok, reason = ev._rule(record, spec.id, edits)
        if not ok or spec.mode == RULE:
            return ok, reason
        ok2, reason2, _ = ev._ask(record, spec)
        return ok2, f"{reason}; {reason2}"
    ok, reason, _ = ev._ask(record, spec)
    return ok, reason


def evaluate(record: GenerationRecord, judge_backend: Backend,
             criteria: Sequence[CriterionSpec] = DEFAULT_CRITERIA,
             lexicon: Optional[Lexicon] = None) -> GenerationRecord:
    return Evaluator(judge_backend, criteria, lexicon).apply(record)
