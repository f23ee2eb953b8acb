"""Rule-table error classifier over the 25 categories.

Rules are tried in a fixed order and the first match wins; anything left
over is OTHER. UNK is never produced. See docs/analyzer.md for the rule
table and its known divergences from ERRANT.
"""

from __future__ import annotations

from typing import Optional, Sequence

from ..core import Edit, ErrorCategory as C
from .lexicon import NUMERALS, Lexicon, common_prefix_len, levenshtein, plural
from .tokenize import is_punct

# Shared prefix needed for a derivational (MORPH) pair, relative to the shorter word.
MORPH_PREFIX_RATIO = 0.6
SPELL_MAX_DISTANCE = 2

_DEGREE_WORDS = frozenset({"more", "most"})

DERIVATIONAL_SUFFIXES = (
    "ly", "ness", "ful", "less", "ment", "tion", "sion", "ity", "ive", "al", "ous", "able",
    "ible", "ic", "ize", "ise", "ance", "ence", "ant", "ent", "y", "er", "or", "ist", "ism",
    "ship", "hood", "cy", "en",
)


def _all_in(tokens: Sequence[str], vocab) -> bool:
    return bool(tokens) and all(t in vocab for t in tokens)


def _strip_possessive(word: str) -> Optional[str]:
    if word.endswith("'s"):
        return word[:-2]
    if word.endswith("s'"):
        return word[:-1]
    return None


def _noun_context(prev: Optional[str], lex: Lexicon) -> bool:
    if prev is None:
        return False
    p = prev.lower()
    possessives = {"my", "your", "his", "her", "its", "our", "their"}
    return (
        p in lex.determiners
        or p in possessives
        or p in NUMERALS
        or p.isdigit()
        or p in lex.prepositions
        or lex.is_adjective(p)
        or _strip_possessive(p) is not None
    )


def _tags(word: str, lex: Lexicon) -> set[str]:
    out: set[str] = set()
    for tags in lex.verb_lemmas(word).values():
        out |= tags
    return out


def _verb_category(w: str, v: str, lex: Lexicon, prev: Optional[str] = None) -> Optional[C]:
    """Same-lemma verb changes: SVA, TENSE or FORM."""
    wl, vl = lex.verb_lemmas(w), lex.verb_lemmas(v)
    shared = set(wl) & set(vl)
    if not shared:
        return None
    lemma = sorted(shared)[0]
    a, b = wl[lemma], vl[lemma]
    if "modal" in a or "modal" in b:
        return None
    present = {"base", "3sg", "pres"}
    if prev is not None:
        p = prev.lower()
        # after have/modal/to the verb slot is fixed, so a change is one of form
        if p == "to" or p in lex.auxiliaries or "have" in lex.verb_lemmas(p):
            return C.VERB_FORM
    if lemma == "be" and {w, v} <= {"was", "were"}:
        return C.VERB_SVA
    if (a & present and b & present) and not (a & b & present):
        return C.VERB_SVA
    if ("past" in a and b & present and "past" not in b) or ("past" in b and a & present and "past" not in a):
        return C.VERB_TENSE
    return C.VERB_FORM


def _verbish(tok: str, lex: Lexicon) -> bool:
    return lex.is_verb_form(tok) or tok in lex.auxiliaries


def classify(edit: Edit, src_tokens: Sequence[str], lexicon: Lexicon,
             tgt_tokens: Optional[Sequence[str]] = None) -> C:
    """Assign one of the 25 categories to ``edit`` (never UNK)."""
    lex = lexicon
    src = [str(t) for t in src_tokens]
    o = src[edit.start:edit.end]
    c = edit.replacement_tokens
    ol = [t.lower() for t in o]
    cl = [t.lower() for t in c]
    both = ol + cl
    prev = src[edit.start - 1] if edit.start > 0 else None
    nxt = src[edit.end].lower() if edit.end < len(src) else None

    # 1. word order
    if edit.category is C.WO or (len(o) > 1 and sorted(ol) == sorted(cl)):
        return C.WO

    # 2. punctuation (optionally with a case change on the neighbouring word)
    if all(is_punct(t) for t in both):
        return C.PUNCT
    if any(is_punct(t) for t in both):
        o_words = [t for t in ol if not is_punct(t)]
        c_words = [t for t in cl if not is_punct(t)]
        if o_words == c_words:
            return C.PUNCT
        # "and" <-> "," style swaps between a conjunction and a mark
        if len(o) == 1 and len(c) == 1 and _all_in(o_words + c_words, lex.conjunctions):
            return C.PUNCT

    # 3. orthography: case, hyphenation, spacing
    if "".join(ol).replace("-", "") == "".join(cl).replace("-", ""):
        return C.ORTH

    # 4. contractions
    if any(t in lex.contractions or t in lex.bare_contractions for t in both):
        return C.CONTR

    # infinitival "to" in front of a base verb belongs to the verb form
    if both == ["to"] and nxt is not None and "base" in _tags(nxt, lex):
        return C.VERB_FORM

    # 5-9. closed classes
    if _all_in(both, lex.determiners):
        return C.DET
    if _all_in(both, lex.prepositions):
        return C.PREP
    if _all_in(both, lex.pronouns):
        return C.PRON
    if _all_in(both, lex.conjunctions):
        return C.CONJ
    if _all_in(both, lex.particles | lex.prepositions) and any(t in lex.particles for t in both):
        return C.PART

    if len(o) == 1 and len(c) == 1:
        w, v = ol[0], cl[0]
        # 10. noun number / inflection / possessive
        w_base, v_base = _strip_possessive(w), _strip_possessive(v)
        if (w_base is not None) != (v_base is not None) or (w_base and v_base and w_base != v_base):
            bw, bv = w_base or w, v_base or v
            if bw == bv or lex.singular_of(bw) == bv or lex.singular_of(bv) == bw or (
                lex.singular_of(bw) and lex.singular_of(bw) == lex.singular_of(bv)
            ):
                return C.NOUN_POSS
        if not lex.known(w):
            sing = lex.singular_of(v) or v
            if sing in lex.irregular_plurals and w in (plural(sing), plural(lex.irregular_plurals[sing])):
                return C.NOUN_INFL
            if v in lex.uncountable and w in (plural(v), v + "s"):
                return C.NOUN_INFL
        nouny = not (lex.is_verb_form(w) or lex.is_verb_form(v)) or _noun_context(prev, lex)
        if nouny:
            irregular = lex.irregular_plurals
            if plural(w) == v or plural(v) == w or irregular.get(w) == v or irregular.get(v) == w:
                return C.NOUN_NUM

        # 11. verb inflection / agreement / tense / form
        if not lex.known(w):
            for lemma in lex.verb_lemmas(v):
                if w in lex.regularized_verb_forms(lemma):
                    return C.VERB_INFL
        verb_cat = _verb_category(w, v, lex, prev)
        if verb_cat is not None:
            return verb_cat

    # "to swim" <-> "swimming": infinitive marker plus a form change of one verb
    o_core = [t for t in ol if t != "to"]
    c_core = [t for t in cl if t != "to"]
    if len(o_core) == 1 and len(c_core) == 1 and (o_core != ol or c_core != cl):
        if set(lex.verb_lemmas(o_core[0])) & set(lex.verb_lemmas(c_core[0])):
            return C.VERB_FORM

    if (len(o) + len(c) > 2 or not (o and c)) and all(_verbish(t, lex) for t in both):
        if not (o and c):
            if all(lex.is_aux(t) for t in both):
                return C.VERB_TENSE
        else:
            return C.VERB_TENSE

    # 12. adjective degree
    o_rest = [t for t in ol if t not in _DEGREE_WORDS]
    c_rest = [t for t in cl if t not in _DEGREE_WORDS]
    if len(o_rest) <= 1 and len(c_rest) <= 1:
        if not o_rest and not c_rest:
            return C.ADJ_FORM
        if len(o_rest) == 1 and len(c_rest) == 1:
            a, b = lex.adj_base(o_rest[0]), lex.adj_base(c_rest[0])
            if a and b and a[0] == b[0] and (a[1] != b[1] or o_rest != ol or c_rest != cl):
                return C.ADJ_FORM

    if len(o) == 1 and len(c) == 1:
        w, v = ol[0], cl[0]
        closed = lex.closed_class
        # 13. derivational morphology
        if (
            lex.known(w)
            and lex.known(v)
            and w not in closed
            and v not in closed
            and common_prefix_len(w, v) >= MORPH_PREFIX_RATIO * min(len(w), len(v))
            and (w.endswith(DERIVATIONAL_SUFFIXES) or v.endswith(DERIVATIONAL_SUFFIXES))
        ):
            return C.MORPH
        # 14. spelling
        if lex.misspellings.get(w) == v or (
            not lex.known(w) and lex.known(v) and levenshtein(w, v) <= SPELL_MAX_DISTANCE
        ):
            return C.SPELL
    if lex.misspellings.get(" ".join(ol)) == " ".join(cl):
        return C.SPELL

    # 15. open-class fallbacks
    if all(_verbish(t, lex) for t in both):
        return C.VERB
    if _all_in(both, lex.adjectives | lex.adj_forms.keys()):
        return C.ADJ
    if both and all(lex.is_adverb(t) for t in both):
        return C.ADV
    # a single-word swap in a noun slot ("a new key" -> "a new lock")
    if len(o) == 1 and len(c) == 1 and _noun_context(prev, lex) and lex.known(ol[0]) and lex.known(cl[0]):
        return C.NOUN
    if both and all(_nounish(t, lex) for t in both):
        return C.NOUN
    # 16.
    return C.OTHER


_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship", "hood", "ism", "ist")


def _nounish(tok: str, lex: Lexicon) -> bool:
    if tok in lex.closed_class or is_punct(tok):
        return False
    if lex.is_noun_word(tok) or tok.endswith(_NOUN_SUFFIXES):
        return True
    return lex.known(tok) and not lex.is_verb_form(tok) and not lex.is_adjective(tok) and not lex.is_adverb(tok)
