"""Word lists and lightweight English morphology used by the classifier.

All data lives in ``analyzer/data``: one list per file, lowercase, ``#``
comments; tables are tab-separated. Inflections of regular verbs, nouns and
adjectives are generated by rule rather than listed.
"""

from __future__ import annotations

import gzip
import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional

VOWELS = frozenset("aeiou")

# Final-syllable-stressed verbs that double their last consonant.
_DOUBLING_VERBS = frozenset(
    "admit commit control equip occur omit permit prefer refer regret submit transfer".split()
)

NUMERALS = frozenset(
    "one two three four five six seven eight nine ten eleven twelve twenty thirty forty "
    "fifty hundred thousand million dozen".split()
)


def _syllables(word: str) -> int:
    groups, prev = 0, False
    for ch in word:
        v = ch in VOWELS or ch == "y"
        if v and not prev:
            groups += 1
        prev = v
    return groups


def _doubles(word: str) -> bool:
    if word in _DOUBLING_VERBS:
        return True
    if len(word) < 3 or _syllables(word) != 1:
        return False
    a, b, c = word[-3], word[-2], word[-1]
    return a not in VOWELS and b in VOWELS and c not in VOWELS and c not in "wxy"


def third_person(base: str) -> str:
    if base.endswith(("s", "x", "z", "ch", "sh", "o")):
        return base + "es"
    if base.endswith("y") and len(base) > 1 and base[-2] not in VOWELS:
        return base[:-1] + "ies"
    return base + "s"


plural = third_person


def past_regular(base: str) -> str:
    if base.endswith("e"):
        return base + "d"
    if base.endswith("y") and len(base) > 1 and base[-2] not in VOWELS:
        return base[:-1] + "ied"
    if _doubles(base):
        return base + base[-1] + "ed"
    return base + "ed"


def ing_form(base: str) -> str:
    if base.endswith("ie"):
        return base[:-2] + "ying"
    if base.endswith("e") and not base.endswith(("ee", "ye", "oe")) and len(base) > 2:
        return base[:-1] + "ing"
    if _doubles(base):
        return base + base[-1] + "ing"
    return base + "ing"


def comparative(base: str) -> str:
    if base.endswith("e"):
        return base + "r"
    if base.endswith("y") and len(base) > 1 and base[-2] not in VOWELS:
        return base[:-1] + "ier"
    if _doubles(base):
        return base + base[-1] + "er"
    return base + "er"


def superlative(base: str) -> str:
    return comparative(base)[:-1] + "st" if comparative(base).endswith("er") else base + "st"


def stems(word: str) -> set[str]:
    """Candidate stems by stripping s/es/ed/ing/er/est.

    Handles consonant doubling (``stopped`` -> ``stop``), e-restoration
    (``loved`` -> ``love``) and y/i alternation (``tried`` -> ``try``).
    Stripped candidates shorter than three letters are dropped.
    """
    w = word.lower()
    out = {w}

    def add(stem: str):
        if len(stem) >= 3:
            out.add(stem)

    if w.endswith("ies") or w.endswith("ied"):
        add(w[:-3] + "y")
    if w.endswith("es"):
        add(w[:-2])
    if w.endswith("s") and not w.endswith("ss"):
        add(w[:-1])
    for suffix in ("ed", "ing", "er", "est"):
        if w.endswith(suffix):
            stem = w[: -len(suffix)]
            add(stem)
            add(stem + "e")
            if len(stem) >= 2 and stem[-1] == stem[-2]:
                add(stem[:-1])
            if stem.endswith("i"):
                add(stem[:-1] + "y")
    return out


def same_stem(a: str, b: str) -> bool:
    return bool(stems(a) & stems(b))


def levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def common_prefix_len(a: str, b: str) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


@dataclass
class Lexicon:
    determiners: frozenset[str]
    prepositions: frozenset[str]
    pronouns: frozenset[str]
    conjunctions: frozenset[str]
    particles: frozenset[str]
    auxiliaries: frozenset[str]
    adverbs: frozenset[str]
    adjectives: frozenset[str]
    nouns: frozenset[str]
    uncountable: frozenset[str]
    contractions: dict[str, str]
    bare_contractions: dict[str, str]
    misspellings: dict[str, str]
    irregular_plurals: dict[str, str]
    words: frozenset[str]
    version: str
    irregular_verbs: frozenset[str] = frozenset()
    verb_forms: dict[str, dict[str, frozenset[str]]] = field(default_factory=dict)
    adj_forms: dict[str, tuple[str, str]] = field(default_factory=dict)
    _known_cache: dict[str, bool] = field(default_factory=dict, repr=False, compare=False)

    @property
    def closed_class(self) -> frozenset[str]:
        return (
            self.determiners
            | self.prepositions
            | self.pronouns
            | self.conjunctions
            | self.particles
            | self.auxiliaries
        )

    # verbs

    def verb_lemmas(self, word: str) -> dict[str, frozenset[str]]:
        """Map lemma -> tags (base, 3sg, pres, past, pp, ing, modal) for ``word``."""
        return self.verb_forms.get(word.lower(), {})

    def is_verb_form(self, word: str) -> bool:
        return word.lower() in self.verb_forms

    def is_aux(self, word: str) -> bool:
        w = word.lower()
        if w in self.auxiliaries:
            return True
        return any(lemma in ("be", "have", "do") for lemma in self.verb_lemmas(w))

    def regularized_verb_forms(self, lemma: str) -> set[str]:
        """Over-regularized (non-standard) forms of an irregular verb."""
        if lemma not in self.irregular_verbs:
            return set()
        past = [f for f, tags in self.verb_forms.items() if tags.get(lemma, frozenset()) & {"past", "pp"}]
        out = {past_regular(lemma), lemma + "ed"}
        out.update(past_regular(p) for p in past)
        out.update(p + "ed" for p in past)
        genuine = {f for f, tags in self.verb_forms.items() if lemma in tags}
        return out - genuine

    # nouns

    def is_noun_word(self, word: str) -> bool:
        w = word.lower()
        return (
            w in self.nouns
            or w in self.uncountable
            or w in self.irregular_plurals
            or w in self.irregular_plurals.values()
            or any(w == plural(n) for n in stems(w) if n in self.nouns)
        )

    def singular_of(self, word: str) -> Optional[str]:
        w = word.lower()
        for sing, pl in self.irregular_plurals.items():
            if pl == w and sing != w:
                return sing
        for stem in sorted(stems(w)):
            if stem != w and plural(stem) == w:
                return stem
        return None

    # adjectives

    def adj_base(self, word: str) -> Optional[tuple[str, str]]:
        """Return (base, degree) with degree in {base, comparative, superlative}."""
        w = word.lower()
        if w in self.adj_forms:
            return self.adj_forms[w]
        if w in self.adjectives:
            return (w, "base")
        for suffix, degree in (("est", "superlative"), ("er", "comparative")):
            if w.endswith(suffix):
                stem = w[: -len(suffix)]
                for cand in (stem, stem + "e", stem[:-1] if len(stem) > 1 and stem[-1] == stem[-2] else None,
                             stem[:-1] + "y" if stem.endswith("i") else None):
                    if cand and (cand in self.adjectives or cand in self.adj_forms):
                        base = self.adj_forms[cand][0] if cand in self.adj_forms else cand
                        return (base, degree)
        return None

    def is_adjective(self, word: str) -> bool:
        w = word.lower()
        return w in self.adjectives or w in self.adj_forms

    def is_adverb(self, word: str) -> bool:
        w = word.lower()
        return w in self.adverbs or (w.endswith("ly") and len(w) > 4 and self.known(w))

    # dictionary

    def known(self, word: str) -> bool:
        """True if ``word`` is a standard English word form."""
        return _known(self, word.lower())


def _known(lex: Lexicon, w: str) -> bool:
    cache = lex._known_cache
    hit = cache.get(w)
    if hit is not None:
        return hit
    cache[w] = result = _compute_known(lex, w)
    return result


def _compute_known(lex: Lexicon, w: str) -> bool:
    if not w:
        return False
    if w in lex.misspellings or w in lex.bare_contractions:
        return False
    if w in lex.verb_forms or w in lex.adj_forms or w in lex.contractions:
        return True
    if w in lex.closed_class or w in lex.adverbs or w in lex.nouns or w in lex.adjectives:
        return True
    if w in lex.irregular_plurals.values():
        return True
    if not w.replace("-", "").replace("'", "").isalpha():
        return True
    if "-" in w:
        return all(_known(lex, part) for part in w.split("-") if part)
    base_known = w in lex.words
    candidates = sorted(
        s for s in stems(w) - {w} if s in lex.words or s in lex.adjectives or s in lex.nouns
    )
    # regularized forms of irregular words are checked first so that a stray
    # dictionary stem ("teache") cannot vouch for "teached"
    for stem in candidates:
        if stem in lex.irregular_verbs and w in (past_regular(stem), third_person(stem), ing_form(stem)):
            # only listed forms of irregular verbs count
            return w in lex.verb_forms
        if (stem in lex.irregular_plurals or stem in lex.uncountable) and w == plural(stem):
            return False
    for stem in candidates:
        if w in (plural(stem), past_regular(stem), ing_form(stem), comparative(stem), superlative(stem)):
            return True
    if base_known:
        return True
    if w.endswith("ly") and (w[:-2] in lex.words or w[:-3] + "y" in lex.words or w[:-2] + "le" in lex.words):
        return True
    return False


def _read_lines(name: str) -> list[str]:
    path = resources.files("gecforge.analyzer") / "data" / name
    raw = path.read_bytes()
    if name.endswith(".gz"):
        raw = gzip.decompress(raw)
    lines = []
    for line in raw.decode("utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return lines


def _read_rows(name: str) -> list[list[str]]:
    return [line.split("\t") for line in _read_lines(name)]


DATA_FILES = (
    "determiners.txt",
    "prepositions.txt",
    "pronouns.txt",
    "conjunctions.txt",
    "particles.txt",
    "auxiliaries.txt",
    "adverbs.txt",
    "adjectives.txt",
    "adjective_forms.tsv",
    "nouns.txt",
    "uncountable_nouns.txt",
    "irregular_nouns.tsv",
    "irregular_verbs.tsv",
    "verb_extra_forms.tsv",
    "regular_verbs.txt",
    "contractions.tsv",
    "misspellings.tsv",
    "words.txt.gz",
)


def _data_hash() -> str:
    h = hashlib.sha256()
    for name in DATA_FILES:
        h.update(name.encode())
        h.update((resources.files("gecforge.analyzer") / "data" / name).read_bytes())
    return h.hexdigest()[:16]


def _add_form(table: dict[str, dict[str, set[str]]], form: str, lemma: str, tag: str):
    table.setdefault(form, {}).setdefault(lemma, set()).add(tag)


def _build_verb_forms(irregular: Iterable[list[str]], regular: Iterable[str],
                      extra: Iterable[list[str]], modals: Iterable[str]):
    table: dict[str, dict[str, set[str]]] = {}
    irregular_lemmas = set()
    for base, past, pp, third, ing in irregular:
        irregular_lemmas.add(base)
        _add_form(table, base, base, "base")
        _add_form(table, past, base, "past")
        _add_form(table, pp, base, "pp")
        _add_form(table, third, base, "3sg")
        _add_form(table, ing, base, "ing")
    for base in regular:
        _add_form(table, base, base, "base")
        _add_form(table, third_person(base), base, "3sg")
        _add_form(table, past_regular(base), base, "past")
        _add_form(table, past_regular(base), base, "pp")
        _add_form(table, ing_form(base), base, "ing")
    for form, lemma, tag in extra:
        _add_form(table, form, lemma, tag)
    for modal in modals:
        _add_form(table, modal, modal, "modal")
    frozen = {f: {l: frozenset(t) for l, t in lemmas.items()} for f, lemmas in table.items()}
    return frozen, frozenset(irregular_lemmas)


@lru_cache(maxsize=1)
def load_lexicon() -> Lexicon:
    """Load the bundled lexicon (cached)."""
    contractions, bare = {}, {}
    for contraction, expansion, bare_form in _read_rows("contractions.tsv"):
        contractions[contraction] = expansion
        bare[bare_form] = contraction
    words = frozenset(_read_lines("words.txt.gz"))
    # bare forms that are also ordinary words stay ordinary words
    bare = {b: c for b, c in bare.items() if b not in words or b in {"dont", "doesnt", "cant", "wont"}}
    misspellings = {wrong: right for wrong, right in _read_rows("misspellings.tsv")}
    auxiliaries = frozenset(_read_lines("auxiliaries.txt"))
    verb_forms, irregular_verbs = _build_verb_forms(
        _read_rows("irregular_verbs.tsv"),
        _read_lines("regular_verbs.txt"),
        _read_rows("verb_extra_forms.tsv"),
        auxiliaries,
    )
    adjectives = frozenset(_read_lines("adjectives.txt"))
    adj_forms: dict[str, tuple[str, str]] = {}
    for base, comp, sup in _read_rows("adjective_forms.tsv"):
        adj_forms.setdefault(base, (base, "base"))
        adj_forms[comp] = (base, "comparative")
        adj_forms[sup] = (base, "superlative")
    irregular_plurals = {sing: pl for sing, pl in _read_rows("irregular_nouns.tsv")}
    return Lexicon(
        determiners=frozenset(_read_lines("determiners.txt")),
        prepositions=frozenset(_read_lines("prepositions.txt")),
        pronouns=frozenset(_read_lines("pronouns.txt")),
        conjunctions=frozenset(_read_lines("conjunctions.txt")),
        particles=frozenset(_read_lines("particles.txt")),
        auxiliaries=auxiliaries,
        adverbs=frozenset(_read_lines("adverbs.txt")),
        adjectives=adjectives,
        nouns=frozenset(_read_lines("nouns.txt")),
        uncountable=frozenset(_read_lines("uncountable_nouns.txt")),
        contractions=contractions,
        bare_contractions=bare,
        misspellings=misspellings,
        irregular_plurals=irregular_plurals,
        words=words - frozenset(misspellings),
        version=_data_hash(),
        irregular_verbs=irregular_verbs,
        verb_forms=verb_forms,
        adj_forms=adj_forms,
    )
