"""Shipped benchmark corpus: task specs, templates, goldens and mutations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .circuit import Circuit, make_component, parse_circuit, serialize_circuit
from .constraints import Phase
from .errors import CircuitError, DataError, FormatError
from .feedback import FeedbackLevel, earliest_phase
from .harness import TaskSpec
from .kg import KnowledgeGraph, parse_kg
from .topology import SystemTemplate, parse_template, verify

KG_RELPATH = Path("kg") / "kg_components.json"


def data_root() -> Path:
    return Path(str(resources.files("pcbverify") / "data"))


def tasks_root(root: Path | None = None) -> Path:
    return (root or data_root()) / "tasks"


def kg_path(root: Path | None = None) -> Path:
    return (root or data_root()) / KG_RELPATH


def load_kg(root: Path | None = None) -> KnowledgeGraph:
    return parse_kg(kg_path(root).read_bytes())


@dataclass(frozen=True)
class MutationDecl:
    name: str
    description: str
    edits: tuple[dict, ...]
    code: str
    phase: Phase

    @property
    def file(self) -> str:
        return f"mutations/{self.name}.circuit.json"


@dataclass(frozen=True)
class TaskBundle:
    spec: TaskSpec
    kg_fragment: KnowledgeGraph
    template: SystemTemplate
    golden: Circuit | None
    mutations: tuple[MutationDecl, ...] = ()
    known_unsatisfied: bool = False
    attributes: dict[str, str] = field(default_factory=dict)
    directory: Path | None = None


def shipped_task_ids(root: Path | None = None) -> list[int]:
    base = tasks_root(root)
    if not base.is_dir():
        return []
    return sorted(int(p.name) for p in base.iterdir()
                  if p.is_dir() and p.name.isdigit() and (p / "task.json").is_file())


def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"missing data file {path}") from None
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: malformed JSON at line {e.lineno}: {e.msg}") from None


def _mutation_from_doc(d: dict, task_id: int) -> MutationDecl:
    try:
        return MutationDecl(d["name"], d.get("description", ""), tuple(d["edits"]),
                            d["expected"]["code"], Phase.from_label(d["expected"]["phase"]))
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"task {task_id}: bad mutation declaration {d!r}: {e}") from None


def load_task_spec(task_id: int, root: Path | None = None) -> tuple[TaskSpec, dict]:
    """The task spec plus the raw task document."""
    directory = tasks_root(root) / str(task_id)
    if not isinstance(task_id, int) or not (directory / "task.json").is_file():
        raise DataError(f"unknown task id {task_id!r}")
    doc = _read_json(directory / "task.json")
    try:
        spec = TaskSpec(
            id=doc["id"],
            name=doc["name"],
            difficulty=doc["difficulty"],
            prompt_payload=doc["prompt_payload"],
            kg_path=kg_path(root),
            template_path=directory / "template.json",
            feedback_level=FeedbackLevel(doc.get("feedback_level", "full")),
        )
    except (KeyError, ValueError) as e:
        raise DataError(f"task {task_id}: bad task.json: {e}") from None
    if spec.id != task_id:
        raise DataError(f"task directory {task_id} holds task id {spec.id}")
    return spec, doc


def load_task_specs(ids: Sequence[int] | None = None, root: Path | None = None) -> list[TaskSpec]:
    return [load_task_spec(i, root)[0] for i in (ids if ids is not None else shipped_task_ids(root))]


def load_bundle(task_id: int, root: Path | None = None, check: bool = True) -> TaskBundle:
    """Load one task bundle; with ``check`` the integrity gate must pass."""
    spec, doc = load_task_spec(task_id, root)
    directory = tasks_root(root) / str(task_id)
    try:
        kg = load_kg(root)
        template = parse_template((directory / "template.json").read_bytes())
        golden_file = directory / "golden.circuit.json"
        golden = parse_circuit(golden_file.read_bytes()) if golden_file.is_file() else None
    except FormatError as e:
        raise DataError(f"task {task_id}: {e}") from None
    except FileNotFoundError as e:
        raise DataError(f"task {task_id}: missing {e.filename}") from None

    parts = set(doc.get("parts", []))
    if golden is not None:
        parts |= {c.part_type for c in golden.components}
    unknown = sorted(p for p in parts if p not in kg)
    if unknown:
        raise DataError(f"task {task_id}: parts missing from the KG: {unknown}")
    bundle = TaskBundle(
        spec=spec,
        kg_fragment=kg.subset(parts),
        template=template,
        golden=golden,
        mutations=tuple(_mutation_from_doc(m, task_id) for m in doc.get("mutations", [])),
        known_unsatisfied=bool(doc.get("known_unsatisfied", False)),
        attributes={k: str(v) for k, v in doc.get("attributes", {}).items()},
        directory=directory,
    )
    if golden is None and bundle.mutations:
        raise DataError(f"task {task_id}: mutations declared without a golden")
    if check:
        problems = check_bundle(bundle)
        if problems:
            raise DataError(f"task {task_id} failed integrity check: " + "; ".join(problems))
    return bundle


# -- edits ---------------------------------------------------------------------

def apply_edit(c: Circuit, edit: dict) -> Circuit:
    """Apply one declarative edit. Raises DataError if it does not apply."""
    op = edit.get("op")
    try:
        if op == "remove_component":
            return c.without_component(edit["ref"])
        if op == "float_pin":
            if c.pin_net(edit["ref"], edit["pin"]) is None:
                raise DataError(f"pin {edit['ref']}.{edit['pin']} is already floating")
            return c.with_pin_floated(edit["ref"], edit["pin"])
        if op == "move_pin":
            if c.pin_net(edit["ref"], edit["pin"]) == edit["net"]:
                raise DataError(f"pin {edit['ref']}.{edit['pin']} is already on {edit['net']}")
            return c.with_pin_moved(edit["ref"], edit["pin"], edit["net"])
        if op == "add_component":
            if c.has_component(edit["ref"]):
                raise DataError(f"component {edit['ref']} already exists")
            comp = make_component(edit["ref"], edit["part_type"],
                                  [tuple(p) for p in edit["pins"]], edit.get("value"))
            bindings = {int(k): v for k, v in edit.get("bindings", {}).items()}
            return c.with_component(comp, bindings)
    except KeyError as e:
        raise DataError(f"edit {edit!r} lacks field {e}") from None
    except CircuitError as e:
        raise DataError(f"edit {edit!r} does not apply: {e}") from None
    raise DataError(f"unknown edit op {op!r}")


def apply_edits(c: Circuit, edits: Sequence[dict]) -> Circuit:
    for e in edits:
        c = apply_edit(c, e)
    return c


def mutation_corpus(bundle: TaskBundle) -> list[Circuit]:
    """Each declared mutation applied to the golden, in declaration order."""
    if bundle.golden is None:
        if bundle.mutations:
            raise DataError(f"task {bundle.spec.id} has mutations but no golden")
        return []
    return [apply_edits(bundle.golden, m.edits) for m in bundle.mutations]


def mutation_outcome_ok(violations, m: MutationDecl) -> bool:
    """A mutation fails as declared when its earliest failing phase is the
    declared one and every violation in that phase carries the declared code."""
    first = earliest_phase(violations)
    if first is not m.phase:
        return False
    return all(v.code == m.code for v in violations if v.phase is first)


def check_bundle(bundle: TaskBundle, kg: KnowledgeGraph | None = None) -> list[str]:
    """Integrity problems of a bundle; empty means sound."""
    kg = kg or bundle.kg_fragment
    problems: list[str] = []
    if bundle.golden is None:
        return problems
    ok, violations = verify(bundle.golden, kg, bundle.template)
    if not ok:
        problems.append("golden fails: " + " | ".join(v.message for v in violations))
    for m, mutated in zip(bundle.mutations, mutation_corpus(bundle)):
        ok, violations = verify(mutated, kg, bundle.template)
        if ok or not mutation_outcome_ok(violations, m):
            got = ", ".join(f"{v.phase.label}:{v.code}" for v in violations) or "pass"
            problems.append(f"mutation {m.name} expected {m.phase.label}:{m.code}, got {got}")
        if bundle.directory is not None:
            shipped = bundle.directory / m.file
            if not shipped.is_file():
                problems.append(f"mutation {m.name}: missing {m.file}")
            elif shipped.read_bytes() != serialize_circuit(mutated):
                problems.append(f"mutation {m.name}: {m.file} differs from its declared edits")
    return problems
