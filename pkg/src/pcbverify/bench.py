"""Run n trials per task and assemble a Pass@k report."""

from __future__ import annotations

import json
import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .feedback import FeedbackLevel, classify_phases
from .harness import DIFFICULTIES, GeneratorAdapter, TaskSpec, TrialResult, run_trial
from .stats import Interval, pass_at_k, round_pct, wilson_interval


@dataclass(frozen=True)
class TaskStats:
    task_id: int
    name: str
    difficulty: str
    n: int
    c: int
    pass_at_k: dict[int, float]
    wilson: Interval


@dataclass(frozen=True)
class RoundPoint:
    round: int
    cumulative_successes: int
    cumulative_tokens: int


@dataclass(frozen=True)
class BenchReport:
    tasks: tuple[TaskStats, ...]
    ks: tuple[int, ...]
    n: int
    z: float
    max_retries: int
    overall_pass_at_1: float
    solved: int
    phase_histograms: dict[str, dict[str, int]] = field(default_factory=dict)
    round_curve: tuple[RoundPoint, ...] = ()

    def to_doc(self) -> dict:
        return {
            "n": self.n,
            "ks": list(self.ks),
            "z": self.z,
            "max_retries": self.max_retries,
            "overall_pass_at_1": self.overall_pass_at_1,
            "solved": self.solved,
            "tasks": [
                {
                    "task_id": t.task_id, "name": t.name, "difficulty": t.difficulty,
                    "n": t.n, "c": t.c,
                    "pass_at_k": {str(k): v for k, v in t.pass_at_k.items()},
                    "wilson_pass_at_1": [t.wilson.low, t.wilson.high],
                }
                for t in self.tasks
            ],
            "phase_histograms": self.phase_histograms,
            "round_curve": [
                {"round": p.round, "cumulative_successes": p.cumulative_successes,
                 "cumulative_tokens": p.cumulative_tokens}
                for p in self.round_curve
            ],
        }


def report_from_trials(tasks: Sequence[TaskSpec], trials: Iterable[TrialResult],
                       ks: Sequence[int], z: float = 1.645, max_retries: int = 3) -> BenchReport:
    """Statistics from raw trial results. Pure, so a report can be rebuilt
    from serialized trials."""
    by_task: dict[int, list[TrialResult]] = defaultdict(list)
    for t in trials:
        by_task[t.task_id].append(t)
    ks = tuple(sorted(set(ks)))
    rows = []
    for spec in tasks:
        results = by_task.get(spec.id, [])
        n = len(results)
        c = sum(r.success for r in results)
        pak = {k: pass_at_k(n, c, k) for k in ks if n >= k}
        rows.append(TaskStats(spec.id, spec.name, spec.difficulty, n, c, pak,
                              wilson_interval(c / n, n, z) if n else Interval(0.0, 1.0)))
    measured = [r for r in rows if r.n]
    overall = (round_pct(sum((Fraction(r.c, r.n) for r in measured), Fraction(0)) / len(measured))
               if measured else 0.0)

    difficulty = {spec.id: spec.difficulty for spec in tasks}
    hist: dict[str, dict[str, int]] = {}
    for level in DIFFICULTIES:
        finals = [r.attempts[-1].violations for tid, rs in by_task.items()
                  if difficulty.get(tid) == level for r in rs if not r.success and r.attempts]
        hist[level] = {p.label: n for p, n in classify_phases(finals).items()}

    rounds = max((len(r.attempts) for rs in by_task.values() for r in rs), default=0)
    curve = []
    for rnd in range(1, rounds + 1):
        succ = sum(1 for rs in by_task.values() for r in rs if r.success and len(r.attempts) <= rnd)
        tok = sum(a.tokens_in + a.tokens_out for rs in by_task.values() for r in rs
                  for a in r.attempts if a.round <= rnd)
        curve.append(RoundPoint(rnd, succ, tok))

    n_max = max((r.n for r in rows), default=0)
    return BenchReport(tuple(rows), ks, n_max, z, max_retries, overall,
                       sum(1 for r in rows if r.c >= 1), hist, tuple(curve))


def run_benchmark(tasks: Sequence[TaskSpec], generator: GeneratorAdapter, n: int = 15,
                  ks: Sequence[int] = (1, 5), max_retries: int = 3, jobs: int | None = None,
                  z: float = 1.645, seed: int = 0,
                  feedback_level: FeedbackLevel | str | None = None,
                  ) -> tuple[BenchReport, list[TrialResult]]:
    """``n`` independent trials per task on a bounded thread pool.

    A trial that fails is data; a harness error (unrunnable generator, broken
    protocol) propagates and aborts the run.
    """
    if n < 1 or not ks or min(ks) < 1 or max(ks) > n:
        raise ValueError(f"need 1 <= k <= n for all k, got n={n}, ks={list(ks)}")
    jobs = jobs or os.cpu_count() or 1
    units = [(spec, i) for spec in tasks for i in range(n)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(run_trial, spec, generator, max_retries, i, seed, feedback_level)
                   for spec, i in units]
        try:
            trials = [f.result() for f in futures]
        except BaseException:
            for f in futures:
                f.cancel()
            raise
    return report_from_trials(tasks, trials, ks, z, max_retries), trials


def render_table(report: BenchReport) -> str:
    """Fixed-width text table: one row per task, Pass@k columns, then totals."""
    head = ["Task ID", "Level"] + [f"Pass@{k}" for k in report.ks] + ["c/n", f"Wilson(z={report.z:g})"]
    lines = []
    for t in report.tasks:
        cells = [str(t.task_id), t.difficulty]
        cells += [f"{t.pass_at_k[k]:.1f}" if k in t.pass_at_k else "-" for k in report.ks]
        cells += [f"{t.c}/{t.n}", f"[{t.wilson.low:.3f}, {t.wilson.high:.3f}]"]
        lines.append(cells)
    widths = [max(len(r[i]) for r in [head] + lines) for i in range(len(head))]

    def fmt(cells: list[str]) -> str:
        return "  ".join(c.rjust(w) for c, w in zip(cells, widths)).rstrip()

    out = [fmt(head), "  ".join("-" * w for w in widths)]
    out += [fmt(r) for r in lines]
    out.append("")
    out.append(f"# Solved: {report.solved}/{len(report.tasks)}")
    out.append(f"Overall Pass@1 (%): {report.overall_pass_at_1:.1f}")
    return "\n".join(out) + "\n"


def write_outputs(out_dir: Path, report: BenchReport, trials: Sequence[TrialResult]) -> dict[str, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out_dir / "report.json",
        "table": out_dir / "report.txt",
        "trials": out_dir / "trials.jsonl",
    }
    paths["report"].write_text(json.dumps(report.to_doc(), indent=2) + "\n", encoding="utf-8")
    paths["table"].write_text(render_table(report), encoding="utf-8")
    with paths["trials"].open("w", encoding="utf-8") as fh:
        for t in sorted(trials, key=lambda t: (t.task_id, t.trial)):
            fh.write(json.dumps(t.to_doc(), separators=(",", ":")) + "\n")
    return paths


def read_trials(path: Path) -> list[TrialResult]:
    with path.open(encoding="utf-8") as fh:
        return [TrialResult.from_doc(json.loads(line)) for line in fh if line.strip()]

