"""Deterministic scripted generator speaking the stdio protocol.

Usage: ``python -m pcbverify.stub MODE [options]``; one request per process.

Modes:
  golden    emit the task's golden netlist every round
  flaky     succeed on a seeded sample of ``--successes`` of ``--of`` trial
            indices, emit a failing mutation otherwise
  repair    emit a mutation on round 1, then the golden once the latest
            feedback mentions ``--expect`` (default: the first message the
            verifier reports for that mutation)
  invalid   emit a document that fails to parse
  garbage   print something that is not JSON
  crash     exit with a nonzero status
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .circuit import circuit_from_doc
from .data import load_bundle, tasks_root
from .topology import verify

MODES = ("golden", "flaky", "repair", "invalid", "garbage", "crash")


def _task_doc(base: Path, task_id: int) -> dict:
    return json.loads((base / str(task_id) / "task.json").read_text(encoding="utf-8"))


def _golden(base: Path, task_id: int) -> dict:
    return json.loads((base / str(task_id) / "golden.circuit.json").read_text(encoding="utf-8"))


def _mutation(base: Path, task_id: int, name: str | None) -> tuple[dict, dict]:
    """The named (or first declared) mutation: its declaration and circuit."""
    decls = _task_doc(base, task_id).get("mutations", [])
    if not decls:
        raise SystemExit(f"stub: task {task_id} declares no mutations")
    decl = next((m for m in decls if m["name"] == name), None) if name else decls[0]
    if decl is None:
        raise SystemExit(f"stub: task {task_id} has no mutation {name!r}")
    path = base / str(task_id) / "mutations" / f"{decl['name']}.circuit.json"
    return decl, json.loads(path.read_text(encoding="utf-8"))


def _first_message(base: Path, task_id: int, circuit: dict) -> str:
    b = load_bundle(task_id, base.parent, check=False)
    _, violations = verify(circuit_from_doc(circuit), b.kg_fragment, b.template)
    return violations[0].message


def succeeding_trials(successes: int, of: int, seed: int, task_id: int) -> frozenset[int]:
    """Trial indices on which the flaky stub succeeds; depends only on its arguments."""
    return frozenset(random.Random(f"{seed}:{task_id}").sample(range(of), successes))


def respond(mode: str, request: dict, args: argparse.Namespace) -> dict:
    base = Path(args.tasks_dir) if args.tasks_dir else tasks_root()
    task_id = request["task_id"]
    if mode == "golden":
        circuit = _golden(base, task_id)
    elif mode == "flaky":
        chosen = succeeding_trials(args.successes, args.of, request.get("seed", 0), task_id)
        if request.get("trial", 0) in chosen:
            circuit = _golden(base, task_id)
        else:
            circuit = _mutation(base, task_id, args.mutation)[1]
    elif mode == "repair":
        decl, circuit = _mutation(base, task_id, args.mutation)
        expect = args.expect or _first_message(base, task_id, circuit)
        history = request.get("history", [])
        if history and expect in history[-1].get("feedback", ""):
            circuit = _golden(base, task_id)
    elif mode == "invalid":
        circuit = {"components": [{"ref": "not a designator"}], "nets": []}
    else:
        raise ValueError(mode)
    return circuit


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="pcbverify.stub", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--tasks-dir", help="task bundle directory (default: shipped corpus)")
    ap.add_argument("--successes", type=int, default=0)
    ap.add_argument("--of", type=int, default=15)
    ap.add_argument("--mutation", help="mutation name (default: first declared)")
    ap.add_argument("--expect", help="feedback substring that triggers the repair")
    args = ap.parse_args(argv)
    if args.mode == "flaky" and not 0 <= args.successes <= args.of:
        ap.error("--successes must lie in [0, --of]")

    raw = sys.stdin.read()
    if args.mode == "crash":
        print("stub: crashing on purpose", file=sys.stderr)
        return 1
    if args.mode == "garbage":
        sys.stdout.write("this is not json\n")
        return 0
    circuit = respond(args.mode, json.loads(raw), args)
    out = json.dumps(circuit)
    reply = {"circuit": circuit, "tokens_in": len(raw.split()), "tokens_out": len(out.split())}
    sys.stdout.write(json.dumps(reply) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
