from __future__ import annotations

import re
import string
from dataclasses import dataclass

PUNCT_CHARS = frozenset(string.punctuation + "“”‘’…–—«»¿¡")

_NUMBER = re.compile(r"^[+-]?\d[\d,.]*%?$")
_ABBREV = frozenset("mr. mrs. ms. dr. st. jr. sr. prof. vs. etc. e.g. i.e. a.m. p.m. no. mt.".split())
_INITIALS = re.compile(r"^(?:[A-Za-z]\.){2,}$")


@dataclass(frozen=True)
class Token:
    surface: str
    kind: str  # word | number | punctuation

    @property
    def lower(self) -> str:
        return self.surface.lower()

    def __str__(self) -> str:
        return self.surface


def is_punct(text: str) -> bool:
    return bool(text) and all(ch in PUNCT_CHARS for ch in text)


def _kind(surface: str) -> str:
    if is_punct(surface):
        return "punctuation"
    if _NUMBER.match(surface):
        return "number"
    return "word"


def _split_run(run: str) -> list[str]:
    """Split a run of punctuation: ellipses stay whole, other marks separate."""
    out = []
    i = 0
    while i < len(run):
        if run.startswith("...", i):
            j = i
            while j < len(run) and run[j] == ".":
                j += 1
            out.append(run[i:j])
            i = j
        else:
            out.append(run[i])
            i += 1
    return out


def _split_chunk(chunk: str) -> list[str]:
    if is_punct(chunk):
        return _split_run(chunk)
    lead_end = 0
    while lead_end < len(chunk) and chunk[lead_end] in PUNCT_CHARS:
        lead_end += 1
    trail_start = len(chunk)
    while trail_start > lead_end and chunk[trail_start - 1] in PUNCT_CHARS:
        trail_start -= 1
    core = chunk[lead_end:trail_start]
    trail = chunk[trail_start:]
    # plural possessive keeps its apostrophe: "teachers'"
    if trail.startswith("'") and core.lower().endswith("s") and not chunk[:lead_end].endswith("'"):
        core, trail = core + "'", trail[1:]
    # abbreviations and initials keep their final period
    if trail.startswith(".") and ((core + ".").lower() in _ABBREV or _INITIALS.match(core + ".")):
        core, trail = core + ".", trail[1:]
    return _split_run(chunk[:lead_end]) + [core] + _split_run(trail)


def tokenize_words(text: str) -> list[str]:
    """Tokenize into surface strings."""
    out: list[str] = []
    for chunk in text.split():
        out.extend(_split_chunk(chunk))
    return out


def tokenize(text: str) -> list[Token]:
    """Split on whitespace, then detach leading/trailing punctuation.

    Internal apostrophes and hyphens stay attached: ``don't`` and
    ``mother-in-law`` are single tokens.
    """
    return [Token(s, _kind(s)) for s in tokenize_words(text)]
