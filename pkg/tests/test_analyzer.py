from __future__ import annotations

import pytest

from gecforge.analyzer import (
    align,
    alignment_cost,
    annotate,
    load_lexicon,
    merge_edits,
    substitution_cost,
    tokenize,
    tokenize_words,
)
from gecforge.analyzer.lexicon import comparative, ing_form, past_regular, same_stem, superlative, third_person
from gecforge.core import Edit, ErrorCategory, SentencePair, apply_edits


@pytest.mark.parametrize("text,tokens", [
    ("I don't like my mother-in-law's car.", ["I", "don't", "like", "my", "mother-in-law's", "car", "."]),
    ("", []),
    ("   ", []),
    ("It costs $5.50, right?!", ["It", "costs", "$", "5.50", ",", "right", "?", "!"]),
])
def test_tokenize_words(text, tokens):
    assert tokenize_words(text) == tokens


def test_tokenize_kinds():
    toks = tokenize("Hi, you.")
    assert [t.surface for t in toks] == ["Hi", ",", "you", "."]
    assert [t.kind for t in toks] == ["word", "punctuation", "word", "punctuation"]


def test_substitution_costs():
    assert substitution_cost("cat", "cat") == 0
    assert substitution_cost("cat", "Cat") == 1
    assert substitution_cost("cat", "cats") == 1
    assert substitution_cost("cat", "dog") == 1.5


def test_align_car_example():
    src, tgt = "The car swims".split(), "The car drives".split()
    ops = align(src, tgt)
    assert [o.op for o in ops] == ["match", "match", "substitute"]
    assert alignment_cost(ops, src, tgt) == 1.5


def test_align_empty_sides():
    assert align([], []) == []
    ops = align([], ["a", "b"])
    assert alignment_cost(ops, [], ["a", "b"]) == 2
    assert apply_edits([], merge_edits(ops, [], ["a", "b"])) == ["a", "b"]


def test_merge_word_order():
    src, tgt = "I only eat apples".split(), "I eat only apples".split()
    edits = merge_edits(align(src, tgt), src, tgt)
    assert [(e.start, e.end, e.replacement) for e in edits] == [(1, 3, "eat only")]


def test_annotate_car():
    edits = annotate(SentencePair("The car swims to the shore.", "The car drives to the shore."))
    assert edits == [Edit(2, 3, "drives", ErrorCategory.VERB)]


def test_annotate_identical_is_empty():
    assert annotate(SentencePair("Nothing changes here.", "Nothing changes here.")) == []


CASES = [
    ("She go to school.", "She goes to school.", [(1, 2, "goes", "VERB:SVA")]),
    ("I saw a elephant.", "I saw an elephant.", [(2, 3, "an", "DET")]),
    ("He is interested on art.", "He is interested in art.", [(3, 4, "in", "PREP")]),
    ("i like paris.", "I like Paris.", [(0, 1, "I", "ORTH"), (2, 3, "Paris", "ORTH")]),
    ("I recieve mail.", "I receive mail.", [(1, 2, "receive", "SPELL")]),
    ("She has two cat.", "She has two cats.", [(3, 4, "cats", "NOUN:NUM")]),
    ("He dont know.", "He doesn't know.", [(1, 2, "doesn't", "CONTR")]),
    ("I only eat apples.", "I eat only apples.", [(1, 3, "eat only", "WO")]),
    ("This is more big.", "This is bigger.", [(2, 4, "bigger", "ADJ:FORM")]),
    ("I went home yesterday", "I went home yesterday.", [(4, 4, ".", "PUNCT")]),
    ("He runned fast.", "He ran fast.", [(1, 2, "ran", "VERB:INFL")]),
    ("I will went.", "I will go.", [(2, 3, "go", "VERB:FORM")]),
    ("She is happy person.", "She is a happy person.", [(2, 2, "a", "DET")]),
    ("He quick ran.", "He quickly ran.", [(1, 2, "quickly", "MORPH")]),
    ("They are my friend's.", "They are my friends.", [(3, 4, "friends", "NOUN:POSS")]),
    ("I like him and she.", "I like him and her.", [(4, 5, "her", "PRON")]),
    ("He wants go.", "He wants to go.", [(2, 2, "to", "VERB:FORM")]),
    ("I want to going.", "I want to go.", [(3, 4, "go", "VERB:FORM")]),
    ("He made a big mistake.", "He made a big error.", [(4, 5, "error", "NOUN")]),
    ("He goes yesterday.", "He went yesterday.", [(1, 2, "went", "VERB:TENSE")]),
    ("I am agree.", "I agree.", [(1, 2, "", "VERB:TENSE")]),
]


@pytest.mark.parametrize("wrong,right,expected", CASES)
def test_classification_examples(wrong, right, expected, lexicon):
    edits = annotate(SentencePair(wrong, right), lexicon)
    assert [(e.start, e.end, e.replacement, e.category.label) for e in edits] == expected
    assert apply_edits(tokenize_words(wrong), edits) == tokenize_words(right)


def test_case_only_change_is_orth(lexicon):
    edits = annotate(SentencePair("we met in london.", "We met in London."), lexicon)
    assert {e.category for e in edits} == {ErrorCategory.ORTH}


def test_morphology_helpers():
    assert third_person("go") == "goes"
    assert third_person("carry") == "carries"
    assert past_regular("stop") == "stopped"
    assert ing_form("make") == "making"
    assert comparative("big") == "bigger"
    assert superlative("happy") == "happiest"
    assert same_stem("cat", "cats") and not same_stem("cat", "dog")


def test_lexicon_version_is_stable():
    a, b = load_lexicon(), load_lexicon()
    assert a.version == b.version
    assert len(a.version) == 16 and int(a.version, 16) >= 0
