from __future__ import annotations

import json
import os

import pytest

from gecforge.core import ALL_SUBJECT_TYPES, GENERABLE_CATEGORIES, Edit, ErrorCategory, SentencePair, SubjectType
from gecforge.store import (
    CELLS,
    FormatError,
    Ledger,
    M2Entry,
    SchemaError,
    atomic_write_text,
    detect_format,
    format_ledger,
    format_m2,
    ledger_update,
    load_corpus_edits,
    next_stratum,
    parse_m2,
    read_m2,
    read_records,
    read_tsv_pairs,
    record_to_dict,
    stratified_quota,
    write_tsv_pairs,
)


@pytest.fixture(scope="module")
def sample_records(fixtures_dir):
    return read_records(fixtures_dir / "records_sample.jsonl")


def test_sample_records(sample_records):
    assert sum(r.accepted for r in sample_records) == 12
    err = [r for r in sample_records if r.error]
    assert len(err) == 1 and err[0].pair is None


def test_missing_field_reports_line(tmp_path, sample_records):
    good = json.dumps(record_to_dict(sample_records[0]))
    d = record_to_dict(sample_records[1])
    del d["right"]
    p = tmp_path / "bad.jsonl"
    p.write_text(good + "\n" + json.dumps(d) + "\n", encoding="utf-8")
    with pytest.raises(SchemaError, match=r"line 2: missing field\(s\): right"):
        read_records(p)


def test_invalid_json_and_bad_values(tmp_path, sample_records):
    p = tmp_path / "bad.jsonl"
    p.write_text("{not json\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="line 1"):
        read_records(p)
    d = record_to_dict(sample_records[0])
    d["category"] = "NOPE"
    p.write_text(json.dumps(d) + "\n", encoding="utf-8")
    with pytest.raises(SchemaError):
        read_records(p)
    d = record_to_dict(sample_records[0])
    d["verdict"]["accepted"] = not d["verdict"]["accepted"]
    p.write_text(json.dumps(d) + "\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="disagrees"):
        read_records(p)


def test_four_field_annotation_is_rejected():
    with pytest.raises(FormatError, match="line 2: annotation has 4 fields"):
        parse_m2("S a b\nA 0 1|||DET|||the|||REQUIRED\n")


@pytest.mark.parametrize("text,msg", [
    ("A 0 1|||DET|||x|||REQUIRED|||-NONE-|||0\n", "before any sentence"),
    ("S a b\nA 0 5|||DET|||x|||REQUIRED|||-NONE-|||0\n", "outside"),
    ("S a b\nA 0 1|||BOGUS|||x|||REQUIRED|||-NONE-|||0\n", "BOGUS"),
    ("S a\nS b\n", "without a preceding blank"),
    ("S a\nZ what\n", "unrecognised"),
])
def test_m2_format_errors(text, msg):
    with pytest.raises(FormatError, match=msg):
        parse_m2(text)


def test_errant_prefixed_sample(fixtures_dir):
    entries = read_m2(fixtures_dir / "sample_errant_prefixed.m2")
    assert len(entries) == 4
    assert entries[0].edits == (Edit(1, 2, "goes", ErrorCategory.VERB_SVA),)  # annotator 1 ignored
    assert entries[1].edits == ()
    assert entries[2].edits == (Edit(2, 3, "", ErrorCategory.PREP),)
    assert entries[3].edits[0].category is ErrorCategory.MORPH


def test_m2_noop_and_deletion_format():
    text = format_m2([M2Entry(("Hi", "."), ()), M2Entry(("a", "b"), (Edit(0, 1, "", ErrorCategory.DET),))])
    assert text == ("S Hi .\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\n"
                    "S a b\nA 0 1|||DET|||-NONE-|||REQUIRED|||-NONE-|||0\n\n")
    assert parse_m2(text)[1].edits[0].replacement == ""


def test_tsv_pairs(tmp_path):
    p = tmp_path / "pairs.tsv"
    pairs = [SentencePair("She go home.", "She goes home."), SentencePair("A apple.", "An apple.")]
    write_tsv_pairs(pairs, p)
    assert read_tsv_pairs(p) == pairs
    loaded = load_corpus_edits(p)
    assert loaded[0][1][0].category is ErrorCategory.VERB_SVA
    p.write_text("only one column\n", encoding="utf-8")
    with pytest.raises(FormatError, match="line 1"):
        read_tsv_pairs(p)
    with pytest.raises(ValueError):
        write_tsv_pairs([SentencePair("a\tb", "c")], p)


def test_detect_format():
    assert detect_format("x.jsonl") == "records"
    assert detect_format("x.M2") == "m2"
    assert detect_format("x.tsv") == "tsv_pairs"
    assert detect_format("x.txt", "m2") == "m2"
    with pytest.raises(ValueError):
        detect_format("x.txt")
    with pytest.raises(ValueError):
        detect_format("x.m2", "csv")


def test_next_stratum_examples():
    first = (SubjectType.COMMON_NOUN, ErrorCategory.ADJ)
    assert next_stratum(Ledger(), 2) == first
    full = Ledger(accepted={c: 2 for c in CELLS})
    assert next_stratum(full, 2) is None
    assert next_stratum(Ledger(), 0) is None
    # least filled wins over enumeration order
    partial = Ledger(accepted={c: 1 for c in CELLS[:-1]})
    assert next_stratum(partial, 2) == CELLS[-1]


def test_cells_cover_grid():
    assert len(CELLS) == len(ALL_SUBJECT_TYPES) * len(GENERABLE_CATEGORIES) == 184


def test_stratified_quota():
    q = stratified_quota(1000)
    assert sum(q.values()) == 1000
    assert set(q.values()) == {5, 6}
    assert sum(stratified_quota(0).values()) == 0


def test_ledger_conservation(sample_records):
    ledger = Ledger(seed=11)
    for r in sample_records:
        ledger = ledger_update(ledger, r)
    assert ledger.generated == len(sample_records)
    assert ledger.accepted_total + ledger.discarded == ledger.generated
    assert ledger.accepted_total == 12
    assert sum(ledger.generated_cells.values()) == ledger.generated
    text = format_ledger(ledger)
    assert "accepted    12" in text and "seed        11" in text


def test_atomic_write_replaces_and_cleans_up(tmp_path):
    p = tmp_path / "out.txt"
    p.write_text("old", encoding="utf-8")
    atomic_write_text(p, "new\n")
    assert p.read_text(encoding="utf-8") == "new\n"
    assert os.listdir(tmp_path) == ["out.txt"]


def test_atomic_write_failure_keeps_original(tmp_path):
    p = tmp_path / "out.txt"
    p.write_text("old", encoding="utf-8")
    with pytest.raises(TypeError):
        atomic_write_text(p, None)  # type: ignore[arg-type]
    assert p.read_text(encoding="utf-8") == "old"
    assert os.listdir(tmp_path) == ["out.txt"]
