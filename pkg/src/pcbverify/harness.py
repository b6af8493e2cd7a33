"""Generate -> verify -> feedback loop over an external generator process."""

from __future__ import annotations

import json
import shlex
import subprocess
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Protocol, Sequence

from .circuit import Circuit, circuit_from_doc, circuit_to_doc, parse_circuit
from .constraints import Phase, Violation, make_violation
from .errors import FormatError, HarnessError
from .feedback import FeedbackLevel, earliest_phase, render
from .kg import KnowledgeGraph, parse_kg
from .topology import SystemTemplate, parse_template, verify

DEFAULT_TIMEOUT = 120.0
DIFFICULTIES = ("Easy", "Medium", "Hard")


def difficulty_of(task_id: int) -> str:
    if 1 <= task_id <= 6:
        return "Easy"
    if 7 <= task_id <= 16:
        return "Medium"
    if 17 <= task_id <= 23:
        return "Hard"
    raise ValueError(f"task id out of range: {task_id}")


@dataclass(frozen=True)
class TaskSpec:
    id: int
    name: str
    difficulty: str
    prompt_payload: str
    kg_path: Path
    template_path: Path
    feedback_level: FeedbackLevel = FeedbackLevel.FULL

    def __post_init__(self):
        if difficulty_of(self.id) != self.difficulty:
            raise ValueError(f"task {self.id} must be {difficulty_of(self.id)}, got {self.difficulty}")


@lru_cache(maxsize=64)
def _load_kg(path: str) -> KnowledgeGraph:
    return parse_kg(Path(path).read_bytes())


@lru_cache(maxsize=64)
def _load_template(path: str) -> SystemTemplate:
    return parse_template(Path(path).read_bytes())


@dataclass(frozen=True)
class GeneratorReply:
    circuit: Any  # the raw "circuit" value, parsed by the harness
    tokens_in: int
    tokens_out: int


class GeneratorFailure(Exception):
    """The generator crashed or timed out; the attempt counts as failed."""


class GeneratorAdapter(Protocol):
    def generate(self, request: dict) -> GeneratorReply: ...


def parse_reply(stdout: str) -> GeneratorReply:
    """Decode a generator's stdout, raising HarnessError on protocol breaks."""
    try:
        doc = json.loads(stdout)
    except json.JSONDecodeError as e:
        raise HarnessError(f"generator output is not JSON: {e.msg} at line {e.lineno}") from None
    if not isinstance(doc, dict):
        raise HarnessError("generator output must be a JSON object")
    missing = [k for k in ("circuit", "tokens_in", "tokens_out") if k not in doc]
    if missing:
        raise HarnessError(f"generator output lacks keys {missing}")
    for k in ("tokens_in", "tokens_out"):
        v = doc[k]
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise HarnessError(f"{k} must be a non-negative integer, got {v!r}")
    return GeneratorReply(doc["circuit"], doc["tokens_in"], doc["tokens_out"])


@dataclass
class SubprocessGenerator:
    """Runs ``argv`` once per attempt, request on stdin, reply on stdout."""

    argv: Sequence[str]
    timeout: float = DEFAULT_TIMEOUT

    @classmethod
    def from_command(cls, command: str, timeout: float = DEFAULT_TIMEOUT) -> SubprocessGenerator:
        argv = shlex.split(command)
        if not argv:
            raise HarnessError("empty generator command")
        return cls(argv, timeout)

    def generate(self, request: dict) -> GeneratorReply:
        try:
            proc = subprocess.run(
                list(self.argv), input=json.dumps(request), capture_output=True,
                text=True, timeout=self.timeout,
            )
        except (FileNotFoundError, PermissionError, NotADirectoryError) as e:
            raise HarnessError(f"cannot run generator {self.argv[0]!r}: {e}") from None
        except subprocess.TimeoutExpired:
            raise GeneratorFailure(f"timed out after {self.timeout:g} s") from None
        if proc.returncode != 0:
            tail = proc.stderr.strip().splitlines()[-1:] or [""]
            raise GeneratorFailure(f"exit status {proc.returncode} {tail[0]}".rstrip())
        return parse_reply(proc.stdout)


@dataclass(frozen=True)
class AttemptRecord:
    round: int
    circuit: Circuit | None
    violations: tuple[Violation, ...]
    tokens_in: int = 0
    tokens_out: int = 0
    feedback: str = ""

    def to_doc(self) -> dict:
        return {
            "round": self.round,
            "circuit": circuit_to_doc(self.circuit) if self.circuit is not None else None,
            "violations": [v.to_doc() for v in self.violations],
            "tokens_in": self.tokens_in,
            "tokens_out": self.tokens_out,
            "feedback": self.feedback,
        }

    @classmethod
    def from_doc(cls, d: dict) -> AttemptRecord:
        circuit = circuit_from_doc(d["circuit"]) if d.get("circuit") is not None else None
        return cls(d["round"], circuit, tuple(Violation.from_doc(v) for v in d["violations"]),
                   d["tokens_in"], d["tokens_out"], d.get("feedback", ""))


@dataclass(frozen=True)
class TrialResult:
    task_id: int
    trial: int
    success: bool
    attempts: tuple[AttemptRecord, ...] = field(default_factory=tuple)

    @property
    def first_fail_phase(self) -> Phase | None:
        if self.success or not self.attempts:
            return None
        return earliest_phase(self.attempts[-1].violations)

    @property
    def total_tokens(self) -> int:
        return sum(a.tokens_in + a.tokens_out for a in self.attempts)

    def to_doc(self) -> dict:
        phase = self.first_fail_phase
        return {
            "task_id": self.task_id,
            "trial": self.trial,
            "success": self.success,
            "first_fail_phase": phase.label if phase else None,
            "total_tokens": self.total_tokens,
            "attempts": [a.to_doc() for a in self.attempts],
        }

    @classmethod
    def from_doc(cls, d: dict) -> TrialResult:
        return cls(d["task_id"], d["trial"], d["success"],
                   tuple(AttemptRecord.from_doc(a) for a in d["attempts"]))


def _failure(code: str, detail: str) -> Violation:
    return make_violation(Phase.SYNTAX_ERC, code, "generator", (detail,))


def run_trial(task: TaskSpec, generator: GeneratorAdapter, max_retries: int = 3,
              trial: int = 0, seed: int = 0,
              feedback_level: FeedbackLevel | str | None = None) -> TrialResult:
    """One trial: up to ``max_retries`` generate/verify rounds, stopping at the
    first passing circuit."""
    if max_retries < 1:
        raise ValueError("max_retries must be >= 1")
    level = FeedbackLevel(feedback_level) if feedback_level is not None else task.feedback_level
    kg = _load_kg(str(task.kg_path))
    template = _load_template(str(task.template_path))

    history: list[dict] = []
    attempts: list[AttemptRecord] = []
    for rnd in range(1, max_retries + 1):
        request = {
            "task_id": task.id, "trial": trial, "seed": seed, "round": rnd,
            "task_prompt": task.prompt_payload, "history": list(history),
        }
        circuit = None
        tokens_in = tokens_out = 0
        try:
            reply = generator.generate(request)
            tokens_in, tokens_out = reply.tokens_in, reply.tokens_out
            raw = reply.circuit
            circuit = parse_circuit(raw) if isinstance(raw, str) else circuit_from_doc(raw)
        except GeneratorFailure as e:
            violations = [_failure("generator_failure", str(e))]
        except FormatError as e:
            violations = [_failure("parse_error", str(e))]
        else:
            _, violations = verify(circuit, kg, template)
        text = render(violations, level).text
        attempts.append(AttemptRecord(rnd, circuit, tuple(violations), tokens_in, tokens_out, text))
        if not violations:
            return TrialResult(task.id, trial, True, tuple(attempts))
        entry: dict[str, Any] = {"feedback": text}
        if circuit is not None:
            entry = {"circuit": circuit_to_doc(circuit), "feedback": text}
        history.append(entry)
    return TrialResult(task.id, trial, False, tuple(attempts))
