"""Command-line front end: ``check``, ``bench`` and ``kg-lint``.

Exit status: 0 pass, 1 verification failed (or lint diagnostics),
2 input or data error, 3 harness or generator-protocol error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from .bench import render_table, run_benchmark, write_outputs
from .circuit import parse_circuit
from .data import load_task_specs, shipped_task_ids
from .errors import DataError, DomainError, FormatError, HarnessError
from .feedback import FeedbackLevel, render, report_doc
from .harness import DEFAULT_TIMEOUT, SubprocessGenerator
from .kg import lint_kg, mean_footprint, parse_kg, token_footprint
from .topology import parse_template, verify

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_HARNESS = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise DataError(f"cannot read {path}: {e.strerror or e}") from None


def cmd_check(args: argparse.Namespace) -> int:
    circuit = parse_circuit(_read(args.netlist))
    kg = parse_kg(_read(args.kg))
    template = parse_template(_read(args.template))
    ok, violations = verify(circuit, kg, template)
    sys.stdout.write(render(violations, args.feedback).text + "\n")
    if args.report:
        doc = report_doc(violations, args.feedback)
        Path(args.report).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return EXIT_PASS if ok else EXIT_FAIL


def _int_list(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def cmd_bench(args: argparse.Namespace) -> int:
    tasks_dir = Path(args.tasks_dir)
    root = tasks_dir.parent
    if not tasks_dir.is_dir():
        raise DataError(f"not a directory: {tasks_dir}")
    if args.tasks:
        ids = args.tasks
    elif args.all:
        ids = shipped_task_ids(root)
    else:
        ids = [i for i in shipped_task_ids(root) if (tasks_dir / str(i) / "golden.circuit.json").is_file()]
    if not ids:
        raise DataError(f"no tasks found under {tasks_dir}")
    specs = load_task_specs(ids, root)
    ks = sorted(set(args.k))
    if args.n < 1 or min(ks) < 1 or max(ks) > args.n:
        raise DataError(f"need 1 <= k <= n, got n={args.n}, k={ks}")
    generator = SubprocessGenerator.from_command(args.generator, args.timeout)
    report, trials = run_benchmark(specs, generator, n=args.n, ks=ks, max_retries=args.retries,
                                   jobs=args.jobs, z=args.z, seed=args.seed,
                                   feedback_level=args.feedback)
    sys.stdout.write(render_table(report))
    if args.out:
        write_outputs(Path(args.out), report, trials)
    return EXIT_PASS


def cmd_kg_lint(args: argparse.Namespace) -> int:
    kg = parse_kg(_read(args.kg))
    diags = lint_kg(kg)
    for d in diags:
        print(f"{d.code}: {d.message}")
    width = max((len(p) for p in kg.entries), default=0)
    for pt in sorted(kg.entries):
        print(f"{pt.ljust(width)}  {token_footprint(kg.entries[pt]):5d} tokens")
    print(f"mean token footprint: {mean_footprint(kg):.1f} over {len(kg.entries)} entries")
    return EXIT_PASS if not diags else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcbverify", description="PCB netlist verifier and benchmark harness.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify one netlist against a KG and a system template")
    p.add_argument("netlist")
    p.add_argument("kg")
    p.add_argument("template")
    p.add_argument("--feedback", choices=[lv.value for lv in FeedbackLevel], default="full")
    p.add_argument("--report", help="write a JSON report here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="run n trials per task through an external generator")
    p.add_argument("tasks_dir", help="the tasks/ directory of a corpus (kg/ is its sibling)")
    p.add_argument("--generator", required=True, help="generator command line, run once per attempt")
    p.add_argument("--n", type=int, default=15)
    p.add_argument("--k", type=_int_list, default=[1, 5], help="comma-separated, default 1,5")
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--z", type=float, default=1.645)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="seconds per attempt")
    p.add_argument("--feedback", choices=[lv.value for lv in FeedbackLevel],
                   help="override each task's feedback level")
    p.add_argument("--tasks", type=_int_list, help="comma-separated task ids")
    p.add_argument("--all", action="store_true", help="include tasks without a golden")
    p.add_argument("--out", help="directory for report.json, report.txt and trials.jsonl")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("kg-lint", help="lint a knowledge graph and print token footprints")
    p.add_argument("kg")
    p.set_defaults(func=cmd_kg_lint)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, DataError, DomainError, ValueError) as e:
        _err(str(e))
        return EXIT_INPUT
    except HarnessError as e:
        _err(f"harness: {e}")
        return EXIT_HARNESS
    except OSError as e:
        _err(str(e))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
