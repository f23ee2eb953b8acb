"""F-beta scoring over edit sets and category distribution statistics."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

from .core import ALL_CATEGORIES, Edit, ErrorCategory, GecForgeError


class MismatchedCorpora(GecForgeError, ValueError):
    pass


class EmptyCorpus(GecForgeError, ValueError):
    pass


@dataclass(frozen=True)
class Score:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f_half: float
    beta: float = 0.5

    def as_percent(self) -> tuple[float, float, float]:
        return self.precision * 100, self.recall * 100, self.f_half * 100


def f_beta(tp: int, fp: int, fn: int, beta: float = 0.5) -> Score:
    """Precision/recall/F-beta with 0/0 := 1 for P and R and 0/0 := 0 for F."""
    if min(tp, fp, fn) < 0:
        raise ValueError("counts must be >= 0")
    if beta <= 0:
        raise ValueError("beta must be > 0")
    p = tp / (tp + fp) if tp + fp else 1.0
    r = tp / (tp + fn) if tp + fn else 1.0
    b2 = beta * beta
    denom = b2 * p + r
    f = (1 + b2) * p * r / denom if denom else 0.0
    return Score(tp, fp, fn, p, r, f, beta)


def f_beta_from_pr(precision: float, recall: float, beta: float = 0.5) -> float:
    b2 = beta * beta
    denom = b2 * precision + recall
    return (1 + b2) * precision * recall / denom if denom else 0.0


EditKey = tuple[int, int, str, ErrorCategory]


def _keys(edits: Iterable[Edit]) -> Counter:
    return Counter((e.start, e.end, e.replacement, e.category) for e in edits)


def score_edits(hyp: Union[Mapping[object, Sequence[Edit]], Sequence[Sequence[Edit]]],
                gold: Union[Mapping[object, Sequence[Edit]], Sequence[Sequence[Edit]]],
                beta: float = 0.5) -> Score:
    """Exact-match edit scoring against a single gold annotation.

    ``hyp`` and ``gold`` map sentence ids to edit lists (a sequence is
    indexed by position). An edit matches when start, end, replacement and
    category are all equal.
    """
    h = hyp if isinstance(hyp, Mapping) else dict(enumerate(hyp))
    g = gold if isinstance(gold, Mapping) else dict(enumerate(gold))
    if set(h) != set(g):
        only_h, only_g = len(set(h) - set(g)), len(set(g) - set(h))
        raise MismatchedCorpora(f"sentence ids differ ({only_h} only in hypothesis, {only_g} only in gold)")
    tp = fp = fn = 0
    for sid in h:
        hk, gk = _keys(h[sid]), _keys(g[sid])
        common = sum((hk & gk).values())
        tp += common
        fp += sum(hk.values()) - common
        fn += sum(gk.values()) - common
    return f_beta(tp, fp, fn, beta)


@dataclass(frozen=True)
class DistributionReport:
    counts: dict[ErrorCategory, int]
    percentages: dict[ErrorCategory, float]
    entropy_nats: float
    chi_square_vs_uniform: float
    n_edits: int

    def rows(self) -> list[tuple[str, int, float]]:
        return [(c.label, self.counts[c], self.percentages[c]) for c in ALL_CATEGORIES]


def shannon_entropy(weights: Iterable[float]) -> float:
    """Natural-log entropy of a weight vector; zero bins contribute nothing."""
    w = [float(x) for x in weights]
    total = sum(w)
    if total <= 0:
        raise EmptyCorpus("no mass to compute entropy over")
    return -sum((x / total) * math.log(x / total) for x in w if x > 0)


def chi_square_uniform(counts: Sequence[float]) -> float:
    total = sum(counts)
    if total <= 0 or not counts:
        raise EmptyCorpus("chi-square needs a positive total")
    expected = total / len(counts)
    return sum((c - expected) ** 2 / expected for c in counts)


def distribution(items: Union[Iterable[Edit], Iterable[ErrorCategory], Mapping[ErrorCategory, int]]) -> DistributionReport:
    """Per-category counts and percentages over all 25 categories."""
    if isinstance(items, Mapping):
        counter = Counter({k: int(v) for k, v in items.items()})
    else:
        counter = Counter(x.category if isinstance(x, Edit) else x for x in items)
    if None in counter:
        raise ValueError("edits must be categorised")
    n = sum(counter.values())
    if n == 0:
        raise EmptyCorpus("no categorised edits")
    counts = {c: counter.get(c, 0) for c in ALL_CATEGORIES}
    pct = {c: 100.0 * counts[c] / n for c in ALL_CATEGORIES}
    return DistributionReport(
        counts=counts,
        percentages=pct,
        entropy_nats=shannon_entropy(counts.values()),
        chi_square_vs_uniform=chi_square_uniform(list(counts.values())),
        n_edits=n,
    )


def distribution_from_percentages(pcts: Mapping[ErrorCategory, float]) -> tuple[float, float]:
    """(entropy, chi-square) for a published percentage column."""
    values = [float(pcts.get(c, 0.0)) for c in ALL_CATEGORIES]
    return shannon_entropy(values), chi_square_uniform(values)
