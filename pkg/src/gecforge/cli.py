"""Command-line entry point: generate, stats, score, annotate, evaluate.

Exit status is 0 on success, 1 on a runtime failure and 2 on a usage error.
Credentials are read from the environment only.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .analyzer import annotate, load_lexicon
from .backend import BackendError, PriceTable, make_backend
from .core import ALL_CATEGORIES, ALL_SUBJECT_TYPES, ErrorCategory, GecForgeError, SubjectType, parse_category
from .evaluator import Evaluator
from .metrics import EmptyCorpus, MismatchedCorpora, distribution, distribution_from_percentages, score_edits
from .pipeline import CORPUS, FREE, REJECTS, STRATIFIED, RunConfig, RunIncomplete, run_generate
from .store import (
    FormatError,
    SchemaError,
    detect_format,
    dumps_record,
    entries_from_pairs,
    format_m2,
    load_corpus_edits,
    read_records,
    read_tsv_pairs,
)

log = logging.getLogger("gecforge")


# stats ---------------------------------------------------------------------


@dataclass
class Column:
    name: str
    percentages: dict[ErrorCategory, float]
    counts: Optional[dict[ErrorCategory, int]]
    entropy: float
    chi_square: float
    n_edits: Optional[int] = None
    subjects: dict[SubjectType, int] = field(default_factory=dict)


def _is_percent_table(path: Path) -> bool:
    if path.suffix.lower() != ".tsv":
        return False
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip() and not line.startswith("#"):
                return line.lower().startswith("category\t")
    return False


def read_percent_table(path: Path) -> list[Column]:
    """A TSV whose header is ``category`` followed by one column per corpus."""
    rows: list[list[str]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip() and not line.startswith("#"):
                rows.append(line.rstrip("\n").split("\t"))
    header, body = rows[0], rows[1:]
    columns = []
    for j, name in enumerate(header[1:], 1):
        pcts: dict[ErrorCategory, float] = {}
        for i, row in enumerate(body, 2):
            if len(row) != len(header):
                raise FormatError(f"expected {len(header)} columns, found {len(row)}", i)
            try:
                pcts[parse_category(row[0])] = float(row[j])
            except ValueError as exc:
                raise FormatError(str(exc), i) from exc
        ent, chi = distribution_from_percentages(pcts)
        columns.append(Column(name, {c: pcts.get(c, 0.0) for c in ALL_CATEGORIES}, None, ent, chi))
    return columns


def corpus_column(path: Path, fmt: Optional[str], lexicon) -> Column:
    kind = detect_format(path, fmt)
    subjects: Counter = Counter()
    if kind == "records":
        edits = []
        for rec in read_records(path):
            if rec.pair is None:
                continue
            subjects[rec.spec.subject_type] += 1
            edits.extend(rec.edits or annotate(rec.pair, lexicon))
    else:
        edits = [e for _, es in load_corpus_edits(path, kind, lexicon) for e in es]
    rep = distribution(edits)
    return Column(path.name, rep.percentages, rep.counts, rep.entropy_nats, rep.chi_square_vs_uniform,
                  rep.n_edits, dict(subjects))


def format_stats(columns: Sequence[Column]) -> str:
    width = max(10, *(len(c.name) for c in columns)) + 2
    head = f"{'category':<11}" + "".join(f"{c.name:>{width}}" for c in columns)
    lines = [head, "-" * len(head)]
    for cat in ALL_CATEGORIES:
        lines.append(f"{cat.label:<11}" + "".join(f"{c.percentages[cat]:>{width}.2f}" for c in columns))
    lines.append("-" * len(head))
    lines.append(f"{'edits':<11}" + "".join(f"{(c.n_edits if c.n_edits is not None else '-'):>{width}}"
                                           for c in columns))
    lines.append(f"{'entropy':<11}" + "".join(f"{c.entropy:>{width}.4f}" for c in columns))
    lines.append(f"{'chi2_unif':<11}" + "".join(f"{c.chi_square:>{width}.2f}" for c in columns))
    with_subjects = [c for c in columns if c.subjects]
    if with_subjects:
        lines += ["", f"{'subject_type':<16}" + "".join(f"{c.name:>{width}}" for c in with_subjects)]
        for st in ALL_SUBJECT_TYPES:
            row = ""
            for c in with_subjects:
                total = sum(c.subjects.values())
                row += f"{100.0 * c.subjects.get(st, 0) / total:>{width}.2f}"
            lines.append(f"{st.label:<16}" + row)
    return "\n".join(lines) + "\n"


def format_stat_records(columns: Sequence[Column]) -> str:
    """One line per corpus and category: corpus, label, count, percent."""
    out = []
    for c in columns:
        for cat in ALL_CATEGORIES:
            count = str(c.counts[cat]) if c.counts is not None else "-"
            out.append(f"{c.name}\t{cat.label}\t{count}\t{c.percentages[cat]:.6f}")
    return "\n".join(out) + "\n"


def cmd_stats(args) -> int:
    lexicon = load_lexicon()
    columns: list[Column] = []
    failed = False
    for p in args.paths:
        path = Path(p)
        try:
            if _is_percent_table(path):
                columns.extend(read_percent_table(path))
            else:
                columns.append(corpus_column(path, args.format, lexicon))
        except (OSError, FormatError, SchemaError, EmptyCorpus, ValueError) as exc:
            print(f"error: {p}: {exc}", file=sys.stderr)
            failed = True
    if columns:
        sys.stdout.write(format_stats(columns))
        if args.records:
            Path(args.records).write_text(format_stat_records(columns), encoding="utf-8")
    return 1 if failed or not columns else 0


# score ---------------------------------------------------------------------


def _edit_sets(path: Path, fmt: Optional[str], lexicon):
    kind = detect_format(path, fmt)
    if kind == "records":
        return kind, {r.id: (r.edits or tuple(annotate(r.pair, lexicon))) if r.pair else r.edits
                      for r in read_records(path)}
    return kind, [edits for _, edits in load_corpus_edits(path, kind, lexicon)]


def cmd_score(args) -> int:
    lexicon = load_lexicon()
    hk, hyp = _edit_sets(Path(args.hyp), args.hyp_format, lexicon)
    gk, gold = _edit_sets(Path(args.gold), args.gold_format, lexicon)
    if (hk == "records") != (gk == "records"):
        hyp = list(hyp.values()) if isinstance(hyp, dict) else hyp
        gold = list(gold.values()) if isinstance(gold, dict) else gold
    if isinstance(hyp, list) and len(hyp) != len(gold):
        raise MismatchedCorpora(f"hypothesis has {len(hyp)} sentences, gold has {len(gold)}")
    s = score_edits(hyp, gold, beta=args.beta)
    p, r, f = s.as_percent()
    print(f"TP {s.tp}  FP {s.fp}  FN {s.fn}")
    print(f"{'P':>7} {'R':>7} {'F' + str(args.beta):>7}")
    print(f"{p:7.2f} {r:7.2f} {f:7.2f}")
    return 0


# annotate / evaluate -------------------------------------------------------


def cmd_annotate(args) -> int:
    path = Path(args.input)
    kind = detect_format(path, args.format)
    if kind == "records":
        pairs = [r.pair for r in read_records(path) if r.pair is not None]
    elif kind == "tsv_pairs":
        pairs = read_tsv_pairs(path)
    else:
        raise GecForgeError("annotate reads TSV pairs or records, not M²")
    text = format_m2(entries_from_pairs(pairs, load_lexicon()))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_evaluate(args) -> int:
    records = read_records(args.input)
    judge = make_backend(args.backend, args.seed)
    evaluator = Evaluator(judge)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kept = dropped = 0
    with open(out / CORPUS, "w", encoding="utf-8") as acc, open(out / REJECTS, "w", encoding="utf-8") as rej:
        for rec in records:
            if rec.pair is not None:
                rec = evaluator.apply(rec)
            if rec.accepted:
                acc.write(dumps_record(rec) + "\n")
                kept += 1
            else:
                rej.write(dumps_record(rec) + "\n")
                dropped += 1
    print(f"accepted {kept}  rejected {dropped}")
    return 0


# generate ------------------------------------------------------------------


def cmd_generate(args) -> int:
    config = RunConfig(
        target_pairs=args.pairs,
        window=args.window,
        seed=args.seed,
        backend=args.backend,
        quota_mode=args.quota,
        concurrency=args.concurrency,
        prices=PriceTable(args.input_price, args.output_price),
        template_dir=Path(args.templates) if args.templates else None,
        out_dir=Path(args.out),
        per_cell=args.per_cell,
        mock_flaw_rate=args.mock_flaw_rate,
        max_jobs=args.max_jobs,
    )
    summary = run_generate(config, resume=args.resume)
    print(summary.format())
    return 0


# parser --------------------------------------------------------------------


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gecforge", description="Generate and audit synthetic GEC corpora.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a corpus")
    g.add_argument("--pairs", type=_positive, default=1000, help="accepted pairs to collect")
    g.add_argument("--window", type=_positive, default=30)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--backend", choices=("mock", "http"), default="mock")
    g.add_argument("--quota", choices=(STRATIFIED, FREE), default=STRATIFIED)
    g.add_argument("--per-cell", type=_non_negative, default=None,
                   help="stratified quota per (subject type, category) cell; overrides --pairs")
    g.add_argument("--concurrency", type=_positive, default=1)
    g.add_argument("--templates", default=None, help="directory overriding the bundled templates")
    g.add_argument("--out", default="out")
    g.add_argument("--input-price", type=float, default=0.5, help="currency per 1M input tokens")
    g.add_argument("--output-price", type=float, default=1.5, help="currency per 1M output tokens")
    g.add_argument("--mock-flaw-rate", type=float, default=0.4)
    g.add_argument("--max-jobs", type=_positive, default=None)
    g.add_argument("--resume", action="store_true", help="continue the run stored in --out")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("stats", help="category distribution table")
    s.add_argument("paths", nargs="+")
    s.add_argument("--format", choices=("records", "m2", "tsv_pairs"), default=None)
    s.add_argument("--records", default=None, help="also write label/count/percent lines here")
    s.set_defaults(func=cmd_stats)

    sc = sub.add_parser("score", help="P/R/F0.5 of hypothesis edits against gold")
    sc.add_argument("hyp")
    sc.add_argument("gold")
    sc.add_argument("--hyp-format", choices=("records", "m2", "tsv_pairs"), default=None)
    sc.add_argument("--gold-format", choices=("records", "m2", "tsv_pairs"), default=None)
    sc.add_argument("--beta", type=float, default=0.5)
    sc.set_defaults(func=cmd_score)

    a = sub.add_parser("annotate", help="sentence pairs to M²")
    a.add_argument("input")
    a.add_argument("-o", "--output", default=None)
    a.add_argument("--format", choices=("records", "tsv_pairs"), default=None)
    a.set_defaults(func=cmd_annotate)

    e = sub.add_parser("evaluate", help="re-gate an existing record corpus")
    e.add_argument("input")
    e.add_argument("--backend", choices=("mock", "http"), default="mock")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", default="out")
    e.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValueError as exc:
        if isinstance(exc, GecForgeError):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (GecForgeError, BackendError, RunIncomplete, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
