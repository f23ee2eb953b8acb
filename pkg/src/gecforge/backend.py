"""Text-generation backends: an OpenAI-compatible HTTP client and a seeded mock.

Both implement ``complete(CompletionRequest) -> Completion`` and are safe to
share between threads. The mock is stateless: each reply depends only on
(seed, prompt), so output never depends on call order or scheduling.
"""

from __future__ import annotations

import hashlib
import os
import random
import re
import threading
import time
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable, Optional, Sequence

import httpx

from .core import (
    NON_DIVERSIFIED,
    ErrorCategory,
    GecForgeError,
    SubjectType,
    TokenUsage,
    parse_category,
)

GENERATION_TEMPERATURE = 1.0
JUDGE_TEMPERATURE = 0.0

DEFAULT_BASE_URL = "https://api.openai.com"
DEFAULT_MODEL = "gpt-3.5-turbo"


class BackendError(GecForgeError):
    retryable = False


class TransientError(BackendError):
    retryable = True


class RateLimitedError(BackendError):
    retryable = True


class FatalError(BackendError):
    pass


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    temperature: float = GENERATION_TEMPERATURE
    max_tokens: int = 512
    stop: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.stop is not None:
            object.__setattr__(self, "stop", tuple(self.stop))


@dataclass(frozen=True)
class Completion:
    text: str
    usage: TokenUsage
    model_id: str


@dataclass(frozen=True)
class PriceTable:
    """Prices in currency units per 1,000,000 tokens."""

    input_price: float = 0.0
    output_price: float = 0.0

    def __post_init__(self):
        if self.input_price < 0 or self.output_price < 0:
            raise ValueError("prices must be >= 0")


def estimate_cost(usage: TokenUsage, prices: PriceTable) -> float:
    return usage.tokens_in * prices.input_price / 1e6 + usage.tokens_out * prices.output_price / 1e6


@dataclass(frozen=True)
class RetryPolicy:
    base: float = 1.0
    cap: float = 32.0
    max_retries: int = 5

    def delay(self, attempt: int, rng: random.Random) -> float:
        """Full-jitter backoff for retry number ``attempt`` (0-based)."""
        return rng.uniform(0.0, min(self.cap, self.base * 2 ** attempt))


class Backend:
    """Interface: thread-safe ``complete`` plus cumulative counters."""

    model_id = "backend"

    def complete(self, request: CompletionRequest) -> Completion:
        raise NotImplementedError

    def close(self) -> None:
        pass


# ---------------------------------------------------------------------------
# HTTP


class HttpBackend(Backend):
    """OpenAI-compatible chat-completions client with bounded retry."""

    def __init__(self, api_key: Optional[str] = None, base_url: Optional[str] = None,
                 model: Optional[str] = None, *, max_in_flight: int = 4,
                 retry: RetryPolicy = RetryPolicy(), timeout: float = 60.0,
                 sleep: Callable[[float], None] = time.sleep, jitter_seed: Optional[int] = None,
                 client: Optional[httpx.Client] = None):
        self.api_key = api_key if api_key is not None else os.environ.get("GECFORGE_API_KEY")
        if not self.api_key:
            raise FatalError("no credential configured (set GECFORGE_API_KEY)")
        self.base_url = (base_url or os.environ.get("GECFORGE_BASE_URL") or DEFAULT_BASE_URL).rstrip("/")
        self.model_id = model or os.environ.get("GECFORGE_MODEL") or DEFAULT_MODEL
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        self.retry = retry
        self._sleep = sleep
        self._gate = threading.BoundedSemaphore(max_in_flight)
        self._lock = threading.Lock()
        self._jitter = random.Random(jitter_seed)
        self._client = client or httpx.Client(timeout=timeout)
        self.retries = 0
        self.calls = 0

    @property
    def url(self) -> str:
        return f"{self.base_url}/v1/chat/completions"

    def _body(self, request: CompletionRequest) -> dict:
        body = {
            "model": self.model_id,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        if request.stop:
            body["stop"] = list(request.stop)
        return body

    def _attempt(self, request: CompletionRequest) -> Completion:
        headers = {"Authorization": f"Bearer {self.api_key}"}
        try:
            resp = self._client.post(self.url, json=self._body(request), headers=headers)
        except httpx.TransportError as exc:
            raise TransientError(f"network error: {exc}") from exc
        if resp.status_code == 429:
            raise RateLimitedError(f"rate limited (429): {resp.text[:200]}")
        if resp.status_code >= 500:
            raise TransientError(f"server error {resp.status_code}: {resp.text[:200]}")
        if resp.status_code >= 400:
            raise FatalError(f"request rejected {resp.status_code}: {resp.text[:200]}")
        try:
            data = resp.json()
            text = data["choices"][0]["message"]["content"] or ""
            usage = data.get("usage") or {}
            return Completion(
                text=text,
                usage=TokenUsage(int(usage.get("prompt_tokens", 0)), int(usage.get("completion_tokens", 0))),
                model_id=str(data.get("model", self.model_id)),
            )
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise FatalError(f"malformed response: {exc}") from exc

    def complete(self, request: CompletionRequest) -> Completion:
        with self._gate:
            attempt = 0
            while True:
                with self._lock:
                    self.calls += 1
                try:
                    return self._attempt(request)
                except BackendError as exc:
                    if not exc.retryable or attempt >= self.retry.max_retries:
                        raise
                    with self._lock:
                        self.retries += 1
                        wait = self.retry.delay(attempt, self._jitter)
                    attempt += 1
                self._sleep(wait)

    def close(self) -> None:
        self._client.close()


# ---------------------------------------------------------------------------
# Mock


@dataclass(frozen=True)
class Exemplar:
    category: ErrorCategory
    pattern: Optional[str]
    wrong_tail: str
    right_tail: str


def _data_rows(name: str) -> list[list[str]]:
    text = (resources.files("gecforge") / "mockdata" / name).read_text(encoding="utf-8")
    return [line.split("\t") for line in text.splitlines() if line and not line.startswith("#")]


@lru_cache(maxsize=None)
def load_subjects() -> dict[SubjectType, list[str]]:
    out: dict[SubjectType, list[str]] = {t: [] for t in SubjectType}
    for label, subject in _data_rows("subjects.tsv"):
        out[SubjectType.parse(label)].append(subject)
    return out


@lru_cache(maxsize=None)
def load_exemplars() -> dict[ErrorCategory, list[Exemplar]]:
    out: dict[ErrorCategory, list[Exemplar]] = {}
    for cat, pattern, wrong, right in _data_rows("exemplars.tsv"):
        category = parse_category(cat)
        out.setdefault(category, []).append(Exemplar(category, pattern or None, wrong, right))
    return out


def noun_phrase(subject: str, subject_type: SubjectType) -> str:
    return subject if subject_type is SubjectType.PROPER_NOUN else f"The {subject}"


_LIST_SUBJECTS = re.compile(r"list (\d+) (?:distinct )?examples of (?:the noun type )?\"?(.+?)\"?[,.]", re.IGNORECASE)
_LIST_SUBJECTS_SHORT = re.compile(r"\blist (\d+) ([a-z]+) nouns\b", re.IGNORECASE)
_LIST_PATTERNS = re.compile(r"list (\d+) (?:distinct )?grammar patterns for (?:the )?error category (\S+)",
                            re.IGNORECASE)
_EXCLUDE = re.compile(r"^do not repeat: (.*)$", re.IGNORECASE | re.MULTILINE)
_GEN_SUBJECT = re.compile(r"subject: (.+?) \((.+?)\)")
_GEN_CATEGORY = re.compile(r"^category: (\S+)", re.MULTILINE)
_GEN_PATTERN = re.compile(r"grammar_type: [^()\n]*\((.+)\)\s*$", re.MULTILINE)
_JUDGE = re.compile(r"Criterion C(\d)")

FLAWS = ("extra_edit", "subject_swap", "pattern_swap", "category_swap")


@dataclass
class MockBackend(Backend):
    """Deterministic offline backend.

    Replies are drawn from the bundled subject and exemplar tables with an
    RNG seeded by (seed, prompt). ``flaw_rate`` is the chance that a
    generated pair breaks one of the evaluator's rule checks; the judge
    always answers ``judge_answer``.
    """

    seed: int = 0
    flaw_rate: float = 0.4
    judge_answer: str = "YES"
    model_id: str = "mock"
    subjects: dict = field(default_factory=load_subjects)
    exemplars: dict = field(default_factory=load_exemplars)

    def __post_init__(self):
        if not 0.0 <= self.flaw_rate <= 1.0:
            raise ValueError("flaw_rate must be in [0, 1]")
        self._lock = threading.Lock()
        self.calls = 0
        self.retries = 0

    def _rng(self, prompt: str) -> random.Random:
        digest = hashlib.sha256(f"{self.seed}\x00{prompt}".encode("utf-8")).digest()
        return random.Random(int.from_bytes(digest[:16], "big"))

    def complete(self, request: CompletionRequest) -> Completion:
        with self._lock:
            self.calls += 1
        prompt = request.prompt
        rng = self._rng(prompt)
        if _JUDGE.search(prompt):
            text = f"{self.judge_answer}\nThe pair satisfies the criterion as stated."
        elif (m := _LIST_PATTERNS.search(prompt)) is not None:
            text = self._list_patterns(int(m.group(1)), parse_category(m.group(2)), prompt, rng)
        elif (m := _LIST_SUBJECTS.search(prompt)) is not None:
            text = self._list_subjects(int(m.group(1)), m.group(2), prompt, rng)
        elif (m := _LIST_SUBJECTS_SHORT.search(prompt)) is not None:
            text = self._list_subjects(int(m.group(1)), f"{m.group(2)} noun", prompt, rng)
        elif _GEN_SUBJECT.search(prompt) and _GEN_CATEGORY.search(prompt):
            text = self._generate(prompt, rng)
        else:
            text = "I cannot help with that request."
        usage = TokenUsage(len(prompt.split()), len(text.split()))
        return Completion(text=text, usage=usage, model_id=self.model_id)

    @staticmethod
    def _excluded(prompt: str) -> set[str]:
        m = _EXCLUDE.search(prompt)
        if not m:
            return set()
        return {x.strip().lower() for x in m.group(1).split(";") if x.strip()}

    @staticmethod
    def _numbered(items: Sequence[str]) -> str:
        return "\n".join(f"{i}. {item}" for i, item in enumerate(items, 1))

    def _draw(self, pool: Sequence[str], n: int, prompt: str, rng: random.Random) -> list[str]:
        excluded = self._excluded(prompt)
        fresh = [x for x in pool if x.lower() not in excluded]
        picked = rng.sample(fresh, min(n, len(fresh)))
        # a real model pads short lists with repeats; so does the mock
        while len(picked) < n and fresh:
            picked.append(rng.choice(fresh))
        return picked

    def _list_subjects(self, n: int, type_text: str, prompt: str, rng: random.Random) -> str:
        try:
            subject_type = SubjectType.parse(type_text)
        except ValueError:
            return "I do not know that kind of noun."
        return self._numbered(self._draw(self.subjects[subject_type], n, prompt, rng))

    def _list_patterns(self, n: int, category: ErrorCategory, prompt: str, rng: random.Random) -> str:
        pool = sorted({e.pattern for e in self.exemplars.get(category, []) if e.pattern})
        return self._numbered(self._draw(pool, n, prompt, rng))

    def _generate(self, prompt: str, rng: random.Random) -> str:
        type_display, subject = _GEN_SUBJECT.search(prompt).groups()
        category = parse_category(_GEN_CATEGORY.search(prompt).group(1))
        pm = _GEN_PATTERN.search(prompt)
        pattern = pm.group(1) if pm else None
        try:
            subject_type = SubjectType.parse(type_display)
        except ValueError:
            subject_type = SubjectType.COMMON_NOUN
        pool = self.exemplars.get(category) or [e for es in self.exemplars.values() for e in es]
        matching = [e for e in pool if pattern is None or e.pattern == pattern] or pool
        ex = rng.choice(matching)
        np_wrong = np_right = noun_phrase(subject, subject_type)
        flaw = rng.choice(FLAWS) if rng.random() < self.flaw_rate else None
        right_tail = ex.right_tail
        if flaw == "pattern_swap" and category not in NON_DIVERSIFIED and len(pool) > 1:
            ex = rng.choice([e for e in pool if e.pattern != ex.pattern])
            right_tail = ex.right_tail
        elif flaw == "category_swap" or flaw == "pattern_swap":
            others = [c for c in sorted(self.exemplars, key=lambda c: c.value) if c is not category]
            ex = rng.choice(self.exemplars[rng.choice(others)])
            right_tail = ex.right_tail
        elif flaw == "subject_swap":
            choices = [s for s in self.subjects[subject_type] if s != subject]
            np_right = noun_phrase(rng.choice(choices), subject_type)
        elif flaw == "extra_edit":
            right_tail = right_tail[:-1] + "!" if right_tail.endswith(".") else right_tail + " too"
            if category is ErrorCategory.PUNCT:
                np_right = np_right.replace("The ", "One ", 1) if np_right.startswith("The ") else "Even " + np_right
        wrong = f"{np_wrong} {ex.wrong_tail}"
        right = f"{np_right} {right_tail}"
        steps = [
            f"Step 1: The subject is {np_wrong}.",
            f"Step 2: Introduce one {category.description.lower()} error"
            + (f" around the pattern {ex.pattern}." if ex.pattern else "."),
            "Step 3: Keep every other word identical in both sentences.",
        ]
        return "\n".join(steps + [f"Wrong: {wrong}", f"Right: {right}"])


def make_backend(kind: str, seed: int = 0, **kwargs) -> Backend:
    if kind == "mock":
        return MockBackend(seed=seed, **kwargs)
    if kind == "http":
        return HttpBackend(**kwargs)
    raise ValueError(f"unknown backend: {kind!r}")
