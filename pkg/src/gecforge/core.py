"""Domain types shared across the package.

Everything here is an immutable value. Category labels use the colon form
("VERB:SVA") in files and on the wire; enum member names use underscores.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence


class GecForgeError(Exception):
    """Base class for all package errors."""


class UnknownCategory(GecForgeError, ValueError):
    pass


class NotGenerable(GecForgeError, ValueError):
    pass


class ValidationError(GecForgeError, ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class SubjectType(Enum):
    COMMON_NOUN = "CommonNoun"
    PROPER_NOUN = "ProperNoun"
    COLLECTIVE_NOUN = "CollectiveNoun"
    COMPOUND_NOUN = "CompoundNoun"
    CONCRETE_NOUN = "ConcreteNoun"
    ABSTRACT_NOUN = "AbstractNoun"
    COUNTABLE_NOUN = "CountableNoun"
    UNCOUNTABLE_NOUN = "UncountableNoun"

    @property
    def label(self) -> str:
        return self.value

    @property
    def display(self) -> str:
        """Human wording used inside prompts, e.g. ``Proper Noun``."""
        return re.sub(r"(?<!^)(?=[A-Z])", " ", self.value)

    @classmethod
    def parse(cls, label: str) -> "SubjectType":
        key = label.replace(" ", "").replace("_", "").lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown subject type: {label!r}")


class ErrorCategory(Enum):
    ADJ = "ADJ"
    ADJ_FORM = "ADJ:FORM"
    ADV = "ADV"
    CONJ = "CONJ"
    CONTR = "CONTR"
    DET = "DET"
    MORPH = "MORPH"
    NOUN = "NOUN"
    NOUN_INFL = "NOUN:INFL"
    NOUN_NUM = "NOUN:NUM"
    NOUN_POSS = "NOUN:POSS"
    ORTH = "ORTH"
    OTHER = "OTHER"
    PART = "PART"
    PREP = "PREP"
    PRON = "PRON"
    PUNCT = "PUNCT"
    SPELL = "SPELL"
    UNK = "UNK"
    VERB = "VERB"
    VERB_FORM = "VERB:FORM"
    VERB_INFL = "VERB:INFL"
    VERB_SVA = "VERB:SVA"
    VERB_TENSE = "VERB:TENSE"
    WO = "WO"

    @property
    def label(self) -> str:
        return self.value

    @property
    def generable(self) -> bool:
        return self not in (ErrorCategory.OTHER, ErrorCategory.UNK)

    @property
    def description(self) -> str:
        return _DESCRIPTIONS[self]


_DESCRIPTIONS = {
    ErrorCategory.ADJ: "Adjective",
    ErrorCategory.ADJ_FORM: "Adjective Form",
    ErrorCategory.ADV: "Adverb",
    ErrorCategory.CONJ: "Conjunction",
    ErrorCategory.CONTR: "Contraction",
    ErrorCategory.DET: "Determiner",
    ErrorCategory.MORPH: "Morphology",
    ErrorCategory.NOUN: "Noun",
    ErrorCategory.NOUN_INFL: "Noun Inflection",
    ErrorCategory.NOUN_NUM: "Noun Number",
    ErrorCategory.NOUN_POSS: "Noun Possessive",
    ErrorCategory.ORTH: "Orthography",
    ErrorCategory.OTHER: "Other",
    ErrorCategory.PART: "Particle",
    ErrorCategory.PREP: "Preposition",
    ErrorCategory.PRON: "Pronoun",
    ErrorCategory.PUNCT: "Punctuation",
    ErrorCategory.SPELL: "Spelling",
    ErrorCategory.UNK: "Unknown",
    ErrorCategory.VERB: "Verb",
    ErrorCategory.VERB_FORM: "Verb Form",
    ErrorCategory.VERB_INFL: "Verb Inflection",
    ErrorCategory.VERB_SVA: "Subject-Verb Agreement",
    ErrorCategory.VERB_TENSE: "Verb Tense",
    ErrorCategory.WO: "Word Order",
}

ALL_CATEGORIES: tuple[ErrorCategory, ...] = tuple(ErrorCategory)
GENERABLE_CATEGORIES: tuple[ErrorCategory, ...] = tuple(c for c in ErrorCategory if c.generable)
ALL_SUBJECT_TYPES: tuple[SubjectType, ...] = tuple(SubjectType)

# Categories whose error surface is mechanical; they get no pattern window.
NON_DIVERSIFIED: frozenset[ErrorCategory] = frozenset(
    {
        ErrorCategory.WO,
        ErrorCategory.SPELL,
        ErrorCategory.ORTH,
        ErrorCategory.CONTR,
        ErrorCategory.NOUN_INFL,
        ErrorCategory.VERB_INFL,
    }
)

_ALIASES = {"MORTH": ErrorCategory.MORPH}
_BY_LABEL = {c.value: c for c in ErrorCategory}
_OP_PREFIX = re.compile(r"^[MRU]:(?=.)", re.IGNORECASE)


def parse_category(label: str) -> ErrorCategory:
    """Parse a category label, case-insensitively.

    Accepts the canonical colon form, the enum member name, the ``MORTH``
    spelling, and ERRANT operation prefixes (``R:VERB:SVA``), which are
    dropped.
    """
    key = label.strip().upper()
    if key in _BY_LABEL:
        return _BY_LABEL[key]
    if key in _ALIASES:
        return _ALIASES[key]
    stripped = _OP_PREFIX.sub("", key)
    if stripped != key:
        return parse_category(stripped)
    if key in ErrorCategory.__members__:
        return ErrorCategory[key]
    raise UnknownCategory(f"unknown error category: {label!r}")


@dataclass(frozen=True)
class SentencePair:
    wrong: str
    right: str


_ABBREVIATIONS = frozenset(
    "mr. mrs. ms. dr. st. jr. sr. prof. vs. etc. e.g. i.e. a.m. p.m. u.s. u.k. no. mt.".split()
)
_TERMINAL = re.compile(r"[.!?]+[\"')\]]*$")


def _is_sentence_break(token: str) -> bool:
    if not _TERMINAL.search(token):
        return False
    core = token.rstrip("\"')]")
    if core.endswith("...") or core.endswith("…"):
        return False
    if core.lower() in _ABBREVIATIONS:
        return False
    # initials like "J."
    if re.fullmatch(r"[A-Z]\.", core):
        return False
    return True


def validate_pair(pair: SentencePair) -> list[str]:
    """Return structural violations of ``pair``; an empty list means ok."""
    violations = []
    for side in ("wrong", "right"):
        text = getattr(pair, side)
        if not text or not text.strip():
            violations.append(f"empty {side} side")
            continue
        tokens = text.split()
        if any(_is_sentence_break(tok) for tok in tokens[:-1]):
            violations.append(f"{side} side contains more than one sentence")
    if pair.wrong.strip() and pair.wrong.strip() == pair.right.strip():
        violations.append("identical sides")
    return violations


@dataclass(frozen=True)
class TokenUsage:
    tokens_in: int = 0
    tokens_out: int = 0

    def __post_init__(self):
        if self.tokens_in < 0 or self.tokens_out < 0:
            raise ValueError("token counts must be non-negative")

    def __add__(self, other: "TokenUsage") -> "TokenUsage":
        return TokenUsage(self.tokens_in + other.tokens_in, self.tokens_out + other.tokens_out)

    @staticmethod
    def total(usages: Iterable["TokenUsage"]) -> "TokenUsage":
        acc = TokenUsage()
        for u in usages:
            acc = acc + u
        return acc


@dataclass(frozen=True)
class PromptSpec:
    subject: str
    subject_type: SubjectType
    category: ErrorCategory
    pattern: Optional[str] = None
    seed_trace: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.category.generable:
            raise NotGenerable(f"{self.category.label} is not a generable category")
        if self.pattern is not None and self.category in NON_DIVERSIFIED:
            raise ValueError(f"{self.category.label} takes no grammar pattern")
        object.__setattr__(self, "seed_trace", tuple(self.seed_trace))


@dataclass(frozen=True)
class Edit:
    """Rewrite of wrong-sentence tokens ``[start, end)`` into ``replacement``.

    ``replacement`` is a space-joined token string; empty means deletion.
    ``category`` is None until the edit has been classified.
    """

    start: int
    end: int
    replacement: str = ""
    category: Optional[ErrorCategory] = None

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValueError(f"bad edit span ({self.start}, {self.end})")
        if self.start == self.end and not self.replacement:
            raise ValueError("an empty-span edit must insert something")

    @property
    def replacement_tokens(self) -> list[str]:
        return self.replacement.split()


def apply_edits(tokens: Sequence[str], edits: Iterable[Edit]) -> list[str]:
    """Apply non-overlapping edits (indexed against ``tokens``)."""
    out: list[str] = []
    pos = 0
    for edit in sorted(edits, key=lambda e: (e.start, e.end)):
        if edit.start < pos or edit.end > len(tokens):
            raise ValueError(f"edit {edit} overlaps or exceeds {len(tokens)} tokens")
        out.extend(tokens[pos:edit.start])
        out.extend(edit.replacement_tokens)
        pos = edit.end
    out.extend(tokens[pos:])
    return out


UNTESTED = "untested (short-circuit)"


@dataclass(frozen=True)
class Verdict:
    c1: bool
    c2: bool
    c3: bool
    c4: bool
    rationales: tuple[str, str, str, str] = ("", "", "", "")
    failed_criterion: Optional[int] = None

    @property
    def criteria(self) -> tuple[bool, bool, bool, bool]:
        return (self.c1, self.c2, self.c3, self.c4)

    @property
    def accepted(self) -> bool:
        return self.c1 and self.c2 and self.c3 and self.c4


@dataclass(frozen=True)
class GenerationRecord:
    id: str
    spec: PromptSpec
    pair: Optional[SentencePair]
    verdict: Optional[Verdict] = None
    edits: tuple[Edit, ...] = ()
    usage: TokenUsage = field(default_factory=TokenUsage)
    created_at: str = ""
    error: Optional[str] = None

    @property
    def accepted(self) -> bool:
        return self.verdict is not None and self.verdict.accepted

    @property
    def job_index(self) -> Optional[int]:
        return self.spec.seed_trace[1] if len(self.spec.seed_trace) > 1 else None
