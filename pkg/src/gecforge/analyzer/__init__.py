"""Edit extraction and 25-category classification."""

from __future__ import annotations

from typing import Optional

from ..core import Edit, SentencePair
from .align import AlignmentOp, align, alignment_cost, merge_edits, substitution_cost
from .classify import classify
from .lexicon import Lexicon, load_lexicon
from .tokenize import Token, tokenize, tokenize_words

__all__ = [
    "AlignmentOp",
    "Lexicon",
    "Token",
    "align",
    "alignment_cost",
    "annotate",
    "annotate_tokens",
    "classify",
    "load_lexicon",
    "merge_edits",
    "substitution_cost",
    "tokenize",
    "tokenize_words",
]


def annotate_tokens(src: list[str], tgt: list[str], lexicon: Optional[Lexicon] = None) -> list[Edit]:
    lex = lexicon or load_lexicon()
    edits = merge_edits(align(src, tgt), src, tgt)
    out = [Edit(e.start, e.end, e.replacement, classify(e, src, lex, tgt)) for e in edits]
    return sorted(out, key=lambda e: (e.start, e.end))


def annotate(pair: SentencePair, lexicon: Optional[Lexicon] = None) -> list[Edit]:
    """Tokenize, align, merge and classify; edits ordered by start index."""
    return annotate_tokens(tokenize_words(pair.wrong), tokenize_words(pair.right), lexicon)
