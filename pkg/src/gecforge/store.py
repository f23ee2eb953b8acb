"""Corpus persistence: JSONL records, M² files, TSV pairs and the run ledger."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .core import (
    ALL_SUBJECT_TYPES,
    GENERABLE_CATEGORIES,
    Edit,
    ErrorCategory,
    GecForgeError,
    GenerationRecord,
    PromptSpec,
    SentencePair,
    SubjectType,
    TokenUsage,
    UnknownCategory,
    Verdict,
    parse_category,
)

PathLike = Union[str, Path]


class SchemaError(GecForgeError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class FormatError(GecForgeError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


FORMATS = {".jsonl": "records", ".m2": "m2", ".tsv": "tsv_pairs"}


def detect_format(path: PathLike, explicit: Optional[str] = None) -> str:
    if explicit:
        if explicit not in FORMATS.values():
            raise ValueError(f"unknown corpus format {explicit!r}")
        return explicit
    suffix = Path(path).suffix.lower()
    if suffix not in FORMATS:
        raise ValueError(f"cannot infer corpus format from {str(path)!r}; pass it explicitly")
    return FORMATS[suffix]


@dataclass(frozen=True)
class CorpusFile:
    path: Path
    format: str
    count: int


# records -------------------------------------------------------------------


def record_to_dict(record: GenerationRecord) -> dict:
    spec = record.spec
    d = {
        "id": record.id,
        "subject": spec.subject,
        "subject_type": spec.subject_type.label,
        "category": spec.category.label,
        "pattern": spec.pattern,
        "seed_trace": list(spec.seed_trace),
        "wrong": record.pair.wrong if record.pair else None,
        "right": record.pair.right if record.pair else None,
        "verdict": None,
        "edits": [
            {"start": e.start, "end": e.end, "replacement": e.replacement,
             "category": e.category.label if e.category else None}
            for e in record.edits
        ],
        "usage": {"tokens_in": record.usage.tokens_in, "tokens_out": record.usage.tokens_out},
        "created_at": record.created_at,
    }
    v = record.verdict
    if v is not None:
        d["verdict"] = {
            "c1": v.c1, "c2": v.c2, "c3": v.c3, "c4": v.c4,
            "rationales": list(v.rationales),
            "accepted": v.accepted,
            "failed_criterion": v.failed_criterion,
        }
    if record.error is not None:
        d["error"] = record.error
    return d


def dumps_record(record: GenerationRecord) -> str:
    return json.dumps(record_to_dict(record), ensure_ascii=False)


_REQUIRED = ("id", "subject", "subject_type", "category", "pattern", "wrong", "right",
             "verdict", "edits", "usage", "created_at")


def record_from_dict(d: Mapping, line: Optional[int] = None) -> GenerationRecord:
    if not isinstance(d, Mapping):
        raise SchemaError("record is not an object", line)
    missing = [k for k in _REQUIRED if k not in d]
    if missing:
        raise SchemaError(f"missing field(s): {', '.join(missing)}", line)
    try:
        spec = PromptSpec(
            subject=str(d["subject"]),
            subject_type=SubjectType.parse(d["subject_type"]),
            category=parse_category(d["category"]),
            pattern=d["pattern"],
            seed_trace=tuple(int(x) for x in d.get("seed_trace", [])),
        )
        if (d["wrong"] is None) != (d["right"] is None):
            raise SchemaError("wrong and right must both be present or both null", line)
        pair = SentencePair(d["wrong"], d["right"]) if d["wrong"] is not None else None
        verdict = None
        if d["verdict"] is not None:
            v = d["verdict"]
            verdict = Verdict(bool(v["c1"]), bool(v["c2"]), bool(v["c3"]), bool(v["c4"]),
                              rationales=tuple(v["rationales"]), failed_criterion=v.get("failed_criterion"))
            if "accepted" in v and bool(v["accepted"]) != verdict.accepted:
                raise SchemaError("verdict.accepted disagrees with c1..c4", line)
        edits = tuple(
            Edit(int(e["start"]), int(e["end"]), str(e["replacement"]),
                 parse_category(e["category"]) if e["category"] is not None else None)
            for e in d["edits"]
        )
        usage = TokenUsage(int(d["usage"]["tokens_in"]), int(d["usage"]["tokens_out"]))
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError, UnknownCategory) as exc:
        raise SchemaError(f"bad field value: {exc}", line) from exc
    return GenerationRecord(
        id=str(d["id"]), spec=spec, pair=pair, verdict=verdict, edits=edits, usage=usage,
        created_at=str(d["created_at"]), error=d.get("error"),
    )


def write_records(records: Iterable[GenerationRecord], path: PathLike) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(dumps_record(rec) + "\n")
            n += 1
    return n


def read_records(path: PathLike) -> list[GenerationRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", i) from exc
            out.append(record_from_dict(d, i))
    return out


# M² ------------------------------------------------------------------------


@dataclass(frozen=True)
class M2Entry:
    tokens: tuple[str, ...]
    edits: tuple[Edit, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "edits", tuple(self.edits))


NOOP = "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0"


def format_m2(entries: Iterable[M2Entry]) -> str:
    blocks = []
    for entry in entries:
        lines = ["S " + " ".join(entry.tokens)]
        if not entry.edits:
            lines.append(NOOP)
        for e in entry.edits:
            if e.category is None:
                raise ValueError("M2 edits need a category")
            if e.end > len(entry.tokens):
                raise ValueError(f"edit {e} exceeds {len(entry.tokens)} tokens")
            repl = e.replacement if e.replacement else "-NONE-"
            lines.append(f"A {e.start} {e.end}|||{e.category.label}|||{repl}|||REQUIRED|||-NONE-|||0")
        # every block, the last included, is followed by one blank line
        blocks.append("\n".join(lines) + "\n\n")
    return "".join(blocks)


def write_m2(entries: Iterable[M2Entry], path: PathLike) -> int:
    entries = list(entries)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_m2(entries))
    return len(entries)


def parse_m2(text: str) -> list[M2Entry]:
    entries: list[M2Entry] = []
    tokens: Optional[list[str]] = None
    edits: list[Edit] = []

    def flush():
        nonlocal tokens, edits
        if tokens is not None:
            entries.append(M2Entry(tuple(tokens), tuple(edits)))
        tokens, edits = None, []

    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r")
        if not line.strip():
            flush()
            continue
        if line.startswith("S"):
            if tokens is not None:
                raise FormatError("sentence line without a preceding blank line", i)
            if line != "S" and not line.startswith("S "):
                raise FormatError("malformed sentence line", i)
            tokens = line[2:].split(" ") if len(line) > 2 else []
            continue
        if line.startswith("A "):
            if tokens is None:
                raise FormatError("annotation before any sentence line", i)
            fields = line[2:].split("|||")
            if len(fields) != 6:
                raise FormatError(f"annotation has {len(fields)} fields, expected 6", i)
            span = fields[0].split()
            if len(span) != 2:
                raise FormatError("annotation span must be two integers", i)
            try:
                start, end = int(span[0]), int(span[1])
                annotator = int(fields[5])
            except ValueError as exc:
                raise FormatError(f"bad integer: {exc}", i) from exc
            if annotator != 0:
                continue
            label = fields[1]
            if label.lower() == "noop" or (start, end) == (-1, -1):
                continue
            try:
                category = parse_category(label)
            except UnknownCategory as exc:
                raise FormatError(str(exc), i) from exc
            repl = "" if fields[2] in ("-NONE-", "") else fields[2]
            if not 0 <= start <= end <= len(tokens):
                raise FormatError(f"span {start} {end} outside a {len(tokens)}-token sentence", i)
            try:
                edits.append(Edit(start, end, repl, category))
            except ValueError as exc:
                raise FormatError(str(exc), i) from exc
            continue
        raise FormatError(f"unrecognised line {line[:30]!r}", i)
    flush()
    return entries


def read_m2(path: PathLike) -> list[M2Entry]:
    with open(path, encoding="utf-8") as fh:
        return parse_m2(fh.read())


# TSV pairs -----------------------------------------------------------------


def read_tsv_pairs(path: PathLike) -> list[SentencePair]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise FormatError(f"expected 2 tab-separated columns, found {len(parts)}", i)
            out.append(SentencePair(parts[0].strip(), parts[1].strip()))
    return out


def write_tsv_pairs(pairs: Iterable[SentencePair], path: PathLike) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in pairs:
            if "\t" in p.wrong or "\t" in p.right or "\n" in p.wrong or "\n" in p.right:
                raise ValueError("pair text may not contain tabs or newlines")
            fh.write(f"{p.wrong}\t{p.right}\n")
            n += 1
    return n


def atomic_write_text(path: PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ledger --------------------------------------------------------------------

Cell = tuple[SubjectType, ErrorCategory]
CELLS: tuple[Cell, ...] = tuple((t, c) for t in ALL_SUBJECT_TYPES for c in GENERABLE_CATEGORIES)


@dataclass(frozen=True)
class Ledger:
    seed: int = 0
    accepted: Mapping[Cell, int] = field(default_factory=dict)
    generated_cells: Mapping[Cell, int] = field(default_factory=dict)
    generated: int = 0
    usage: TokenUsage = field(default_factory=TokenUsage)

    @property
    def accepted_total(self) -> int:
        return sum(self.accepted.values())

    @property
    def discarded(self) -> int:
        return self.generated - self.accepted_total

    def count(self, cell: Cell) -> int:
        return self.accepted.get(cell, 0)


def ledger_update(ledger: Ledger, record: GenerationRecord) -> Ledger:
    cell = (record.spec.subject_type, record.spec.category)
    accepted = dict(ledger.accepted)
    gen_cells = dict(ledger.generated_cells)
    gen_cells[cell] = gen_cells.get(cell, 0) + 1
    if record.accepted:
        accepted[cell] = accepted.get(cell, 0) + 1
    return replace(ledger, accepted=accepted, generated_cells=gen_cells,
                   generated=ledger.generated + 1, usage=ledger.usage + record.usage)


QuotaLike = Union[int, Mapping[Cell, int]]


def cell_quota(quota: QuotaLike, cell: Cell) -> int:
    q = quota if isinstance(quota, int) else quota.get(cell, 0)
    if q < 0:
        raise ValueError("quota must be >= 0")
    return q


def next_stratum(ledger: Ledger, quota: QuotaLike) -> Optional[Cell]:
    """Least-filled cell still under quota (enumeration order breaks ties); None when done."""
    best: Optional[Cell] = None
    best_count = 0
    for cell in CELLS:
        n = ledger.count(cell)
        if n >= cell_quota(quota, cell):
            continue
        if best is None or n < best_count:
            best, best_count = cell, n
    return best


def stratified_quota(target: int) -> dict[Cell, int]:
    """Spread ``target`` over the 184 cells; the first ``target % 184`` get one extra."""
    base, extra = divmod(target, len(CELLS))
    return {cell: base + (1 if i < extra else 0) for i, cell in enumerate(CELLS)}


def format_ledger(ledger: Ledger, quota: Optional[QuotaLike] = None) -> str:
    lines = [
        f"seed        {ledger.seed}",
        f"generated   {ledger.generated}",
        f"accepted    {ledger.accepted_total}",
        f"discarded   {ledger.discarded}",
        f"tokens_in   {ledger.usage.tokens_in}",
        f"tokens_out  {ledger.usage.tokens_out}",
        "",
        f"{'subject_type':<16} {'category':<11} {'accepted':>8} {'generated':>9}" + (f" {'quota':>5}" if quota is not None else ""),
    ]
    for cell in CELLS:
        a, g = ledger.count(cell), ledger.generated_cells.get(cell, 0)
        if quota is None and not g:
            continue
        row = f"{cell[0].label:<16} {cell[1].label:<11} {a:>8} {g:>9}"
        if quota is not None:
            row += f" {cell_quota(quota, cell):>5}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def write_ledger(ledger: Ledger, path: PathLike, quota: Optional[QuotaLike] = None) -> None:
    atomic_write_text(path, format_ledger(ledger, quota))


def load_corpus_edits(path: PathLike, fmt: Optional[str] = None,
                      lexicon=None) -> list[tuple[Optional[SentencePair], tuple[Edit, ...]]]:
    """Edits per sentence from any supported format (TSV pairs are annotated)."""
    kind = detect_format(path, fmt)
    if kind == "m2":
        return [(None, e.edits) for e in read_m2(path)]
    if kind == "records":
        return [(r.pair, r.edits) for r in read_records(path)]
    from .analyzer import annotate

    return [(p, tuple(annotate(p, lexicon))) for p in read_tsv_pairs(path)]


def entries_from_pairs(pairs: Sequence[SentencePair], lexicon=None) -> list[M2Entry]:
    from .analyzer import annotate, tokenize_words

    return [M2Entry(tuple(tokenize_words(p.wrong)), tuple(annotate(p, lexicon))) for p in pairs]
