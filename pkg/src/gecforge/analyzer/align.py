"""Token alignment and edit extraction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from ..core import Edit, ErrorCategory
from .lexicon import same_stem
from .tokenize import Token

MATCH, SUBSTITUTE, DELETE, INSERT = "match", "substitute", "delete", "insert"

# Transposed tokens may sit at most this many source positions apart.
TRANSPOSITION_WINDOW = 3

TokenLike = Union[str, Token]


@dataclass(frozen=True)
class AlignmentOp:
    op: str
    src_range: tuple[int, int]
    tgt_range: tuple[int, int]


def _surface(tok: TokenLike) -> str:
    return tok.surface if isinstance(tok, Token) else tok


def substitution_cost(a: str, b: str) -> float:
    if a == b:
        return 0.0
    if a.lower() == b.lower() or same_stem(a, b):
        return 1.0
    return 1.5


def alignment_cost(ops: Sequence[AlignmentOp], src: Sequence[TokenLike], tgt: Sequence[TokenLike],
                   sub_cost: Callable[[str, str], float] = substitution_cost) -> float:
    total = 0.0
    for op in ops:
        if op.op in (DELETE, INSERT):
            total += 1.0
        elif op.op == SUBSTITUTE:
            total += sub_cost(_surface(src[op.src_range[0]]), _surface(tgt[op.tgt_range[0]]))
    return total


def align(src: Sequence[TokenLike], tgt: Sequence[TokenLike],
          sub_cost: Callable[[str, str], float] = substitution_cost) -> list[AlignmentOp]:
    """Minimum-cost token alignment.

    Costs: match 0, insert/delete 1, substitute 1 for case-only or same-stem
    pairs and 1.5 otherwise. Among equal-cost paths the backtrace prefers
    match, then substitute, delete, insert, which leaves differences at the
    leftmost position.
    """
    s = [_surface(t) for t in src]
    t = [_surface(x) for x in tgt]
    n, m = len(s), len(t)
    cost = [[0.0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        cost[i][0] = float(i)
    for j in range(1, m + 1):
        cost[0][j] = float(j)
    subs = [[0.0] * m for _ in range(n)]
    for i in range(n):
        row = subs[i]
        for j in range(m):
            row[j] = sub_cost(s[i], t[j])
    for i in range(1, n + 1):
        prev, cur, srow = cost[i - 1], cost[i], subs[i - 1]
        for j in range(1, m + 1):
            cur[j] = min(prev[j - 1] + srow[j - 1], prev[j] + 1.0, cur[j - 1] + 1.0)

    ops: list[AlignmentOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = cost[i][j]
        if i > 0 and j > 0 and cost[i - 1][j - 1] + subs[i - 1][j - 1] == here:
            kind = MATCH if s[i - 1] == t[j - 1] else SUBSTITUTE
            ops.append(AlignmentOp(kind, (i - 1, i), (j - 1, j)))
            i, j = i - 1, j - 1
        elif i > 0 and cost[i - 1][j] + 1.0 == here:
            ops.append(AlignmentOp(DELETE, (i - 1, i), (j, j)))
            i -= 1
        else:
            ops.append(AlignmentOp(INSERT, (i, i), (j - 1, j)))
            j -= 1
    ops.reverse()
    return ops


def _transposition_partner(ops: Sequence[AlignmentOp], k: int, src: Sequence[str],
                           tgt: Sequence[str], used: set[int]) -> Optional[int]:
    op = ops[k]
    if op.op == DELETE:
        word, pos, want = src[op.src_range[0]].lower(), op.src_range[0], INSERT
    elif op.op == INSERT:
        word, pos, want = tgt[op.tgt_range[0]].lower(), op.src_range[0], DELETE
    else:
        return None
    for q in range(k + 1, len(ops)):
        other = ops[q]
        if other.src_range[0] - pos > TRANSPOSITION_WINDOW:
            break
        if q in used or other.op != want:
            continue
        other_word = (tgt[other.tgt_range[0]] if want == INSERT else src[other.src_range[0]]).lower()
        if other_word == word:
            return q
    return None


def merge_edits(ops: Sequence[AlignmentOp], src: Sequence[TokenLike],
                tgt: Sequence[TokenLike]) -> list[Edit]:
    """Group alignment ops into span edits.

    Adjacent non-match ops merge into one edit. A deleted token re-inserted
    (or an inserted token deleted) within three positions merges everything
    between into a single span, flagged WO when the span is a pure reordering.
    """
    s = [_surface(x) for x in src]
    t = [_surface(x) for x in tgt]
    n = len(ops)
    transposed = [False] * n
    used: set[int] = set()
    for k in range(n):
        if k in used:
            continue
        q = _transposition_partner(ops, k, s, t, used)
        if q is None:
            continue
        used.update((k, q))
        for r in range(k, q + 1):
            transposed[r] = True

    edits: list[Edit] = []
    k = 0
    while k < n:
        if ops[k].op == MATCH and not transposed[k]:
            k += 1
            continue
        start = k
        while k < n and (ops[k].op != MATCH or transposed[k]):
            k += 1
        block = ops[start:k]
        s0, s1 = block[0].src_range[0], block[-1].src_range[1]
        t0, t1 = block[0].tgt_range[0], block[-1].tgt_range[1]
        category = None
        if any(transposed[start:k]) and sorted(w.lower() for w in s[s0:s1]) == sorted(
            w.lower() for w in t[t0:t1]
        ):
            category = ErrorCategory.WO
        edits.append(Edit(s0, s1, " ".join(t[t0:t1]), category))
    return edits
