"""Feedback-level ablation with the scripted repair generator.

For every task with mutations, the stub first emits the task's first declared
mutation and switches to the golden only once the feedback names the
violated rule. Full feedback names it, weak and none do not, so the success
rate orders full > weak = none. Absolute rates say nothing about real models.

    python3 scripts/feedback_ablation.py --n 2
"""

from __future__ import annotations

import argparse
import shlex
import sys
from dataclasses import dataclass

from pcbverify.bench import run_benchmark
from pcbverify.data import load_task_specs, shipped_task_ids, tasks_root
from pcbverify.feedback import FeedbackLevel
from pcbverify.harness import SubprocessGenerator


@dataclass
class Config:
    n: int = 2
    retries: int = 3
    jobs: int = 8


@dataclass
class Row:
    level: str
    pass_at_1: float
    mean_attempts: float
    solved: int
    total: int


def ablate(cfg: Config) -> list[Row]:
    ids = [i for i in shipped_task_ids() if (tasks_root() / str(i) / "golden.circuit.json").is_file()]
    specs = load_task_specs(ids)
    gen = SubprocessGenerator.from_command(shlex.join([sys.executable, "-m", "pcbverify.stub", "repair"]))
    rows = []
    for level in FeedbackLevel:
        report, trials = run_benchmark(specs, gen, n=cfg.n, ks=(1,), max_retries=cfg.retries,
                                       jobs=cfg.jobs, feedback_level=level)
        attempts = sum(len(t.attempts) for t in trials) / len(trials)
        rows.append(Row(level.value, report.overall_pass_at_1, attempts, report.solved, len(specs)))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--retries", type=int, default=Config.retries)
    ap.add_argument("--jobs", type=int, default=Config.jobs)
    a = ap.parse_args()
    rows = ablate(Config(a.n, a.retries, a.jobs))
    print(f"{'feedback':<9} {'Pass@1':>7} {'attempts':>9} {'solved':>7}")
    for r in rows:
        print(f"{r.level:<9} {r.pass_at_1:7.1f} {r.mean_attempts:9.2f} {r.solved:>3}/{r.total}")


if __name__ == "__main__":
    main()
