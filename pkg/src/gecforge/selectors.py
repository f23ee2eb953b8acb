"""Subject and grammar-target sampling with windowed candidate generation.

Each job draws from its own numpy Generator seeded by (seed, job index), so
a job's choices do not depend on how many workers run or in which order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .backend import Backend, CompletionRequest, GENERATION_TEMPERATURE
from .core import (
    ALL_SUBJECT_TYPES,
    GENERABLE_CATEGORIES,
    NON_DIVERSIFIED,
    ErrorCategory,
    GecForgeError,
    NotGenerable,
    SubjectType,
    TokenUsage,
)

DEFAULT_WINDOW = 30
MAX_REREQUESTS = 2


class CandidateShortfall(GecForgeError):
    pass


@dataclass(frozen=True)
class SubjectChoice:
    subject_type: SubjectType
    candidates: tuple[str, ...]
    chosen: str
    usage: TokenUsage = field(default_factory=TokenUsage)


@dataclass(frozen=True)
class GrammarTarget:
    category: ErrorCategory
    candidates: tuple[str, ...] = ()
    pattern: Optional[str] = None
    usage: TokenUsage = field(default_factory=TokenUsage)


def job_rng(seed: int, job_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, job_index]))


def requires_diversification(category: ErrorCategory) -> bool:
    if not category.generable:
        raise NotGenerable(f"{category.label} is not a generable category")
    return category not in NON_DIVERSIFIED


def select_subject_type(rng: np.random.Generator,
                        allowed: Optional[Sequence[SubjectType]] = None) -> SubjectType:
    pool = tuple(allowed) if allowed else ALL_SUBJECT_TYPES
    return pool[int(rng.integers(len(pool)))]


def select_category(rng: np.random.Generator,
                    weights: Optional[Mapping[ErrorCategory, float]] = None) -> ErrorCategory:
    """Uniform over the generable categories unless ``weights`` is given."""
    if not weights:
        return GENERABLE_CATEGORIES[int(rng.integers(len(GENERABLE_CATEGORIES)))]
    for cat in weights:
        if not cat.generable:
            raise NotGenerable(f"{cat.label} is not a generable category")
    w = np.array([max(0.0, float(weights.get(c, 0.0))) for c in GENERABLE_CATEGORIES])
    if w.sum() <= 0:
        raise ValueError("category weights sum to zero")
    return GENERABLE_CATEGORIES[int(rng.choice(len(w), p=w / w.sum()))]


_NUMBERING = re.compile(r"^\s*(?:\d+[.)]|[-*•])\s*")


def parse_candidates(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        item = _NUMBERING.sub("", line).strip()
        if len(item) > 1 and item[0] == item[-1] and item[0] in "\"'`":
            item = item[1:-1].strip()
        if item:
            out.append(item)
    return out


def subject_prompt(subject_type: SubjectType, n: int, exclude: Sequence[str] = ()) -> str:
    lines = [
        f'List {n} distinct examples of the noun type "{subject_type.display}", one per line, numbered.',
        "Use the singular form and no articles. Vary the topics widely.",
    ]
    if exclude:
        lines.append("Do not repeat: " + "; ".join(exclude))
    return "\n".join(lines)


def pattern_prompt(category: ErrorCategory, n: int, exclude: Sequence[str] = ()) -> str:
    lines = [
        f"List {n} distinct grammar patterns for the error category {category.label} ({category.description}), "
        "one per line, numbered.",
        "Each pattern is a short word or construction, such as a verb, a collocation or a paired "
        "conjunction written as first...second.",
    ]
    if exclude:
        lines.append("Do not repeat: " + "; ".join(exclude))
    return "\n".join(lines)


def gather_candidates(backend: Backend, window: int,
                      prompt_for: Callable[[int, Sequence[str]], str]) -> tuple[list[str], TokenUsage]:
    """Ask for ``window`` items, dedup case-insensitively, re-ask on shortfall."""
    if window < 1:
        raise ValueError("window must be >= 1")
    candidates: list[str] = []
    seen: set[str] = set()
    usage = TokenUsage()
    for _ in range(1 + MAX_REREQUESTS):
        prompt = prompt_for(window - len(candidates), candidates)
        reply = backend.complete(CompletionRequest(prompt, temperature=GENERATION_TEMPERATURE))
        usage = usage + reply.usage
        for item in parse_candidates(reply.text):
            key = item.lower()
            if key not in seen and len(candidates) < window:
                seen.add(key)
                candidates.append(item)
        if len(candidates) >= window:
            break
    floor = math.ceil(window / 2)
    if len(candidates) < floor:
        raise CandidateShortfall(f"only {len(candidates)} distinct candidates, need at least {floor}")
    return candidates, usage


def make_subject(backend: Backend, rng: np.random.Generator, window: int = DEFAULT_WINDOW,
                 subject_type: Optional[SubjectType] = None) -> SubjectChoice:
    if window < 1:
        raise ValueError("window must be >= 1")
    st = subject_type or select_subject_type(rng)
    candidates, usage = gather_candidates(backend, window, lambda n, ex: subject_prompt(st, n, ex))
    chosen = candidates[int(rng.integers(len(candidates)))]
    return SubjectChoice(st, tuple(candidates), chosen, usage)


def make_grammar_target(backend: Backend, rng: np.random.Generator, window: int = DEFAULT_WINDOW,
                        category: Optional[ErrorCategory] = None,
                        weights: Optional[Mapping[ErrorCategory, float]] = None) -> GrammarTarget:
    if window < 1:
        raise ValueError("window must be >= 1")
    cat = category or select_category(rng, weights)
    if not requires_diversification(cat):
        return GrammarTarget(cat)
    candidates, usage = gather_candidates(backend, window, lambda n, ex: pattern_prompt(cat, n, ex))
    pattern = candidates[int(rng.integers(len(candidates)))]
    return GrammarTarget(cat, tuple(candidates), pattern, usage)
