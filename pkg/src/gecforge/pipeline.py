"""The generation loop: selectors, prompt, backend, parse, evaluator, store.

Work is planned in rounds. Each round plans one job per missing accepted
pair, numbered globally, so the plan depends only on the ledger at the
start of the round. Jobs run on a thread pool and are committed in job
order by a single writer, which makes the output independent of the worker
count and lets an interrupted run be replayed from its record files.
"""

from __future__ import annotations

import json
import logging
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterator, Optional, Union

from .analyzer import Lexicon, load_lexicon, tokenize_words
from .backend import Backend, BackendError, CompletionRequest, GENERATION_TEMPERATURE, PriceTable, estimate_cost, make_backend
from .core import (
    ALL_SUBJECT_TYPES,
    GENERABLE_CATEGORIES,
    GecForgeError,
    GenerationRecord,
    PromptSpec,
    TokenUsage,
    ValidationError,
    Verdict,
)
from .evaluator import Evaluator, JudgeParseError
from .prompting import ParseError, PromptTemplate, build_generation_prompt, load_template, parse_completion
from .selectors import CandidateShortfall, DEFAULT_WINDOW, job_rng, make_grammar_target, make_subject
from .store import (
    CELLS,
    Cell,
    Ledger,
    M2Entry,
    QuotaLike,
    cell_quota,
    dumps_record,
    ledger_update,
    next_stratum,
    read_records,
    stratified_quota,
    write_ledger,
    write_m2,
)

log = logging.getLogger(__name__)

STRATIFIED, FREE = "uniform_stratified", "free"
CHECKPOINT_EVERY = 100
CORPUS, REJECTS, LEDGER, SUMMARY, M2 = "corpus.jsonl", "rejects.jsonl", "ledger.txt", "summary.json", "corpus.m2"

# mock records get reproducible timestamps: this epoch plus one second per job
MOCK_EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)
_ID_NAMESPACE = uuid.UUID("6f1c1d2e-8a4b-5c3d-9e0f-a1b2c3d4e5f6")


class RunIncomplete(GecForgeError):
    """The job budget ran out before the quota was met."""


@dataclass(frozen=True)
class RunConfig:
    target_pairs: int = 1000
    window: int = DEFAULT_WINDOW
    seed: int = 0
    backend: str = "mock"
    quota_mode: str = STRATIFIED
    concurrency: int = 1
    prices: PriceTable = field(default_factory=lambda: PriceTable(0.5, 1.5))
    template_dir: Optional[Path] = None
    out_dir: Path = Path("out")
    per_cell: Optional[int] = None
    mock_flaw_rate: float = 0.4
    max_jobs: Optional[int] = None

    def __post_init__(self):
        if self.per_cell is None and self.target_pairs < 1:
            raise ValueError("target_pairs must be >= 1")
        if self.per_cell is not None and self.per_cell < 0:
            raise ValueError("per_cell must be >= 0")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.concurrency < 1:
            raise ValueError("concurrency must be >= 1")
        if self.quota_mode not in (STRATIFIED, FREE):
            raise ValueError(f"unknown quota mode {self.quota_mode!r}")
        if self.per_cell is not None and self.quota_mode != STRATIFIED:
            raise ValueError("per_cell needs the stratified quota mode")
        if not 0.0 <= self.mock_flaw_rate <= 1.0:
            raise ValueError("mock_flaw_rate must be in [0, 1]")

    @property
    def quota(self) -> QuotaLike:
        if self.per_cell is not None:
            return self.per_cell
        return stratified_quota(self.target_pairs)

    @property
    def target(self) -> int:
        if self.quota_mode == FREE:
            return self.target_pairs
        return sum(cell_quota(self.quota, c) for c in CELLS)

    @property
    def job_budget(self) -> int:
        return self.max_jobs if self.max_jobs is not None else 20 * self.target + 1000


@dataclass(frozen=True)
class RunSummary:
    accepted: int
    discarded: int
    generated: int
    target: int
    cost_estimate: float
    usage: TokenUsage
    failures: dict[str, int]
    per_stratum: dict[str, dict[str, int]]
    elapsed: float = 0.0

    @property
    def discard_rate(self) -> float:
        return self.discarded / self.generated if self.generated else 0.0

    def to_dict(self) -> dict:
        """Machine-readable form; wall-clock time is left out so reruns compare equal."""
        return {
            "target": self.target,
            "generated": self.generated,
            "accepted": self.accepted,
            "discarded": self.discarded,
            "discard_rate": round(self.discard_rate, 6),
            "tokens_in": self.usage.tokens_in,
            "tokens_out": self.usage.tokens_out,
            "cost_estimate": round(self.cost_estimate, 6),
            "failures_by_criterion": self.failures,
            "per_stratum": self.per_stratum,
        }

    def format(self) -> str:
        return "\n".join([
            f"generated     {self.generated}",
            f"accepted      {self.accepted} (target {self.target})",
            f"discarded     {self.discarded}",
            f"discard_rate  {self.discard_rate:.4f}",
            f"tokens        {self.usage.tokens_in} in / {self.usage.tokens_out} out",
            f"cost_estimate ${self.cost_estimate:.4f}",
            f"elapsed       {self.elapsed:.1f}s",
        ])


def record_id(seed: int, job: int) -> str:
    return str(uuid.uuid5(_ID_NAMESPACE, f"{seed}:{job}"))


def failed_verdict(reason: str) -> Verdict:
    return Verdict(False, False, False, False, rationales=(reason,) * 4, failed_criterion=0)


class Generator:
    """Runs single jobs; shareable across worker threads."""

    def __init__(self, config: RunConfig, backend: Backend, judge: Optional[Backend] = None,
                 lexicon: Optional[Lexicon] = None, template: Optional[PromptTemplate] = None):
        self.config = config
        self.backend = backend
        self.lexicon = lexicon or load_lexicon()
        self.evaluator = Evaluator(judge or backend, lexicon=self.lexicon)
        self.template = template or load_template("generation", config.template_dir)
        self.deterministic_clock = getattr(backend, "model_id", "") == "mock"

    def _timestamp(self, job: int) -> str:
        if self.deterministic_clock:
            moment = MOCK_EPOCH + timedelta(seconds=job)
        else:
            moment = datetime.now(timezone.utc).replace(microsecond=0)
        return moment.isoformat().replace("+00:00", "Z")

    def run_job(self, job: int, cell: Optional[Cell]) -> GenerationRecord:
        cfg = self.config
        rng = job_rng(cfg.seed, job)
        usage = TokenUsage()
        base = dict(id=record_id(cfg.seed, job), created_at=self._timestamp(job))
        stype, category = cell if cell is not None else (None, None)
        spec = None
        try:
            subject = make_subject(self.backend, rng, cfg.window, subject_type=stype)
            usage = usage + subject.usage
            target = make_grammar_target(self.backend, rng, cfg.window, category=category)
            usage = usage + target.usage
            spec = PromptSpec(subject.chosen, subject.subject_type, target.category, target.pattern,
                              seed_trace=(cfg.seed, job))
            reply = self.backend.complete(CompletionRequest(build_generation_prompt(spec, self.template),
                                                            temperature=GENERATION_TEMPERATURE))
            usage = usage + reply.usage
            pair = parse_completion(reply.text)
            record = GenerationRecord(spec=spec, pair=pair, usage=usage, **base)
            return self.evaluator.apply(record)
        except (CandidateShortfall, ParseError, ValidationError, JudgeParseError) as exc:
            if spec is None:
                spec = PromptSpec(
                    subject="", subject_type=stype or ALL_SUBJECT_TYPES[0],
                    category=category or GENERABLE_CATEGORIES[0], seed_trace=(cfg.seed, job),
                )
            reason = f"{type(exc).__name__}: {exc}"
            return GenerationRecord(spec=spec, pair=None, verdict=failed_verdict(reason), usage=usage,
                                    error=reason, **base)


def plan_round(ledger: Ledger, config: RunConfig, first_job: int) -> list[tuple[int, Optional[Cell]]]:
    """One job per missing accepted pair, assuming every job will succeed."""
    if config.quota_mode == FREE:
        missing = max(0, config.target_pairs - ledger.accepted_total)
        return [(first_job + i, None) for i in range(missing)]
    quota = config.quota
    projected = dict(ledger.accepted)
    plan: list[tuple[int, Optional[Cell]]] = []
    view = Ledger(accepted=projected)
    while (cell := next_stratum(view, quota)) is not None:
        plan.append((first_job + len(plan), cell))
        projected[cell] = projected.get(cell, 0) + 1
    return plan


def _read_committed(path: Path) -> list[GenerationRecord]:
    """Read a record file, cutting off a partial last line left by a crash."""
    if not path.exists():
        return []
    raw = path.read_bytes()
    if raw and not raw.endswith(b"\n"):
        cut = raw.rfind(b"\n") + 1
        log.warning("truncating partial line at the end of %s", path)
        with open(path, "r+b") as fh:
            fh.truncate(cut)
    return read_records(path)


def _summary(ledger: Ledger, config: RunConfig, failures: dict[int, int], elapsed: float) -> RunSummary:
    per_stratum: dict[str, dict[str, int]] = {}
    for stype, cat in CELLS:
        g = ledger.generated_cells.get((stype, cat), 0)
        if g:
            per_stratum.setdefault(stype.label, {})[cat.label] = ledger.count((stype, cat))
    return RunSummary(
        accepted=ledger.accepted_total,
        discarded=ledger.discarded,
        generated=ledger.generated,
        target=config.target,
        cost_estimate=estimate_cost(ledger.usage, config.prices),
        usage=ledger.usage,
        failures={str(k): failures[k] for k in sorted(failures)},
        per_stratum=per_stratum,
        elapsed=elapsed,
    )


def run_generate(config: RunConfig, backend: Optional[Backend] = None, judge: Optional[Backend] = None,
                 resume: bool = False) -> RunSummary:
    """Generate until the quota is met; writes corpus, rejects, ledger, summary and M² files.

    With ``resume`` the existing record files in ``out_dir`` are replayed
    and only the missing jobs are run. Without it they are overwritten.
    """
    started = time.monotonic()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / name for name in (CORPUS, REJECTS, LEDGER, SUMMARY, M2)}
    if backend is None:
        kw = {"flaw_rate": config.mock_flaw_rate} if config.backend == "mock" else {}
        backend = make_backend(config.backend, config.seed, **kw)
    gen = Generator(config, backend, judge)

    done: dict[int, GenerationRecord] = {}
    if resume:
        for rec in _read_committed(paths[CORPUS]) + _read_committed(paths[REJECTS]):
            if rec.job_index is None or rec.spec.seed_trace[0] != config.seed:
                raise GecForgeError(f"record {rec.id} does not belong to a run with seed {config.seed}")
            done[rec.job_index] = rec
    else:
        for name in (CORPUS, REJECTS):
            paths[name].write_text("", encoding="utf-8")

    ledger = Ledger(seed=config.seed)
    failures: dict[int, int] = {}
    accepted_records: list[GenerationRecord] = []
    next_job = 0
    since_checkpoint = 0

    corpus_fh = open(paths[CORPUS], "a", encoding="utf-8", newline="\n")
    rejects_fh = open(paths[REJECTS], "a", encoding="utf-8", newline="\n")
    pool = ThreadPoolExecutor(max_workers=config.concurrency, thread_name_prefix="gen")

    def commit(rec: GenerationRecord, replay: bool) -> None:
        nonlocal ledger, since_checkpoint
        ledger = ledger_update(ledger, rec)
        if rec.accepted:
            accepted_records.append(rec)
        else:
            fc = rec.verdict.failed_criterion if rec.verdict else 0
            failures[fc or 0] = failures.get(fc or 0, 0) + 1
        if replay:
            return
        fh = corpus_fh if rec.accepted else rejects_fh
        fh.write(dumps_record(rec) + "\n")
        fh.flush()
        if rec.accepted:
            since_checkpoint += 1
            if since_checkpoint >= CHECKPOINT_EVERY:
                write_ledger(ledger, paths[LEDGER], config.quota if config.quota_mode == STRATIFIED else None)
                since_checkpoint = 0

    def outcomes(plan: list[tuple[int, Optional[Cell]]]) -> Iterator[tuple[GenerationRecord, bool]]:
        todo = [(job, cell) for job, cell in plan if job not in done]
        if len(todo) != len(plan):
            committed = [done[job] for job, _ in plan if job in done]
            if [job for job, _ in plan[:len(committed)]] != [r.job_index for r in committed]:
                raise GecForgeError("committed records are not a prefix of the replayed plan")
            for rec in committed:
                yield rec, True
        if todo:
            yield from ((rec, False) for rec in pool.map(lambda jc: gen.run_job(*jc), todo))

    quota_arg = config.quota if config.quota_mode == STRATIFIED else None
    try:
        while True:
            plan = plan_round(ledger, config, next_job)
            if not plan:
                break
            if next_job + len(plan) > config.job_budget:
                plan = plan[: max(0, config.job_budget - next_job)]
                if not plan:
                    raise RunIncomplete(
                        f"stopped after {next_job} jobs with {ledger.accepted_total}/{config.target} accepted")
            for rec, replay in outcomes(plan):
                commit(rec, replay)
            next_job += len(plan)
    except (BackendError, RunIncomplete):
        write_ledger(ledger, paths[LEDGER], quota_arg)
        raise
    finally:
        pool.shutdown(wait=True, cancel_futures=True)
        corpus_fh.close()
        rejects_fh.close()

    write_ledger(ledger, paths[LEDGER], quota_arg)
    write_m2((M2Entry(tuple(tokenize_words(r.pair.wrong)), r.edits) for r in accepted_records), paths[M2])
    summary = _summary(ledger, config, failures, time.monotonic() - started)
    paths[SUMMARY].write_text(json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return summary


def summary_from_file(path: Union[str, Path]) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
