"""Phase 1 (structural ERC) and Phase 2 (KG constraint) checks."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from enum import IntEnum
from typing import AbstractSet, Iterable

from .circuit import Circuit, Component
from .kg import SUPPLY_ROLES, ConstraintDecl, ConstraintKind, KnowledgeGraph, PinRole


class Phase(IntEnum):
    SYNTAX_ERC = 1
    KG_CONSTRAINT = 2
    TOPOLOGY = 3
    SYSTEM_TOPOLOGY = 4

    @property
    def label(self) -> str:
        return _PHASE_LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> Phase:
        for p, text in _PHASE_LABELS.items():
            if text == label:
                return p
        raise ValueError(f"unknown phase {label!r}")


_PHASE_LABELS = {
    Phase.SYNTAX_ERC: "Phase1_SyntaxERC",
    Phase.KG_CONSTRAINT: "Phase2_KGConstraint",
    Phase.TOPOLOGY: "Phase3_Topology",
    Phase.SYSTEM_TOPOLOGY: "Phase4_SystemTopology",
}


@dataclass(frozen=True)
class Violation:
    phase: Phase
    code: str
    subject: str
    pins: tuple[str, ...] = ()
    nets: tuple[str, ...] = ()
    message: str = ""

    def to_doc(self) -> dict:
        return {
            "phase": self.phase.label,
            "code": self.code,
            "subject": self.subject,
            "pins": list(self.pins),
            "nets": list(self.nets),
            "message": self.message,
        }

    @classmethod
    def from_doc(cls, d: dict) -> Violation:
        return cls(Phase.from_label(d["phase"]), d["code"], d["subject"],
                   tuple(d["pins"]), tuple(d["nets"]), d["message"])


def format_message(code: str, subject: str, pins: tuple[str, ...], nets: tuple[str, ...]) -> str:
    """Full-detail text for Phase 1/2 violations; a pure function of its inputs."""
    if code == "supply_pair":
        return f"{subject}: supply pair shorted ({pins[0]} and {pins[1]} on {nets[0]})"
    if code == "must_be_connected":
        return f"{subject}: pin {pins[0]} is unconnected"
    if code == "driving_pair":
        where = f"on {nets[0]}" if nets else "unconnected"
        return f"{subject}: gate net appears floating ({pins[0]} {where})"
    if code == "differential_pair_must_be_distinct":
        return f"{subject}: differential pins on same net ({pins[0]}={nets[0]})"
    if code == "isolation_bridge":
        return f"{subject}: isolation barrier bridged ({' and '.join(pins)} on {nets[0]})"
    if code == "unknown_part":
        return f"{subject}: unknown part type {pins[0]}"
    if code == "single_endpoint_net":
        return f"net {nets[0]} has a single endpoint ({subject}.{pins[0]})"
    if code == "floating_supply_pin":
        return f"{subject}: supply pin {pins[0]} is floating"
    if code == "multiple_drivers":
        return f"multiple drivers on net {nets[0]} ({', '.join(pins)})"
    if code == "parse_error":
        return f"circuit document rejected: {pins[0]}"
    if code == "generator_failure":
        return f"generator failed: {pins[0]}"
    raise ValueError(f"no message template for code {code!r}")


def make_violation(phase: Phase, code: str, subject: str,
                   pins: Iterable[str] = (), nets: Iterable[str] = ()) -> Violation:
    pins, nets = tuple(pins), tuple(nets)
    return Violation(phase, code, subject, pins, nets, format_message(code, subject, pins, nets))


def _sort_key(v: Violation):
    return (v.phase, v.subject, v.pins, v.code, v.nets)


def _pin_name(comp: Component, number: int) -> str:
    p = comp.pin(number)
    return p.name if p else str(number)


def check_erc(c: Circuit, kg: KnowledgeGraph,
              external_nets: AbstractSet[str] = frozenset()) -> list[Violation]:
    """Phase 1 structural checks.

    ``external_nets`` are nets that leave the board through a template port;
    they may legitimately have a single on-board endpoint.
    """
    out: list[Violation] = []
    p1 = Phase.SYNTAX_ERC
    for comp in c.components:
        if comp.part_type not in kg:
            out.append(make_violation(p1, "unknown_part", comp.ref, (comp.part_type,)))

    for net in c.nets:
        if len(net.endpoints) == 1 and net.name not in external_nets:
            ref, pin = net.endpoints[0]
            out.append(make_violation(p1, "single_endpoint_net", ref,
                                      (_pin_name(c.component(ref), pin),), (net.name,)))

    for comp in c.components:
        if comp.part_type not in kg:
            continue
        entry = kg.entry(comp.part_type)
        required = {n for d in entry.constraints
                    if d.kind is ConstraintKind.MUST_BE_CONNECTED for n in d.pins}
        for kp in entry.pins:
            if kp.role in SUPPLY_ROLES and kp.name in required and comp.pin(kp.number) is not None \
                    and c.pin_net(comp.ref, kp.number) is None:
                out.append(make_violation(p1, "floating_supply_pin", comp.ref, (kp.name,)))

    drivers: dict[str, list[tuple[str, str]]] = defaultdict(list)
    for comp in c.components:
        if comp.part_type not in kg:
            continue
        for kp in kg.entry(comp.part_type).pins:
            if kp.role is PinRole.OUT:
                net = c.pin_net(comp.ref, kp.number)
                if net is not None:
                    drivers[net].append((comp.ref, kp.name))
    for net, pins in drivers.items():
        if len({ref for ref, _ in pins}) >= 2:
            pins = sorted(pins)
            out.append(make_violation(p1, "multiple_drivers", pins[0][0],
                                      tuple(f"{r}.{n}" for r, n in pins), (net,)))
    return sorted(out, key=_sort_key)


def eval_constraint(decl: ConstraintDecl, comp: Component, c: Circuit,
                    kg: KnowledgeGraph | None = None) -> list[Violation]:
    """Evaluate one declared constraint on one component instance.

    Pin names in ``decl`` are resolved through the KG entry when given, else
    through the component's own pin names. Returns at most one violation except
    for must_be_connected, which reports each floating pin.
    """
    def net(name: str) -> str | None:
        number = None
        if kg is not None and comp.part_type in kg:
            kp = kg.entry(comp.part_type).pin_named(name)
            number = kp.number if kp else None
        if number is None:
            p = comp.pin_named(name)
            number = p.number if p else None
        return None if number is None else c.pin_net(comp.ref, number)

    p2 = Phase.KG_CONSTRAINT
    kind = decl.kind
    if kind is ConstraintKind.SUPPLY_PAIR:
        a, b = decl.pins
        na, nb = net(a), net(b)
        if na is not None and na == nb:
            return [make_violation(p2, kind.value, comp.ref, (a, b), (na,))]
        return []
    if kind is ConstraintKind.DIFFERENTIAL_PAIR_MUST_BE_DISTINCT:
        a, b = decl.pins
        na, nb = net(a), net(b)
        if na is not None and na == nb:
            return [make_violation(p2, kind.value, comp.ref, (a, b), (na,))]
        return []
    if kind is ConstraintKind.MUST_BE_CONNECTED:
        return [make_violation(p2, kind.value, comp.ref, (name,))
                for name in decl.pins if net(name) is None]
    if kind is ConstraintKind.DRIVING_PAIR:
        (gate,) = decl.pins
        ng = net(gate)
        if ng is None:
            return [make_violation(p2, kind.value, comp.ref, (gate,))]
        if len(c.net(ng).endpoints) < 2:
            return [make_violation(p2, kind.value, comp.ref, (gate,), (ng,))]
        return []
    raise ValueError(f"unhandled constraint kind {kind!r}")


def check_intra(c: Circuit, kg: KnowledgeGraph) -> list[Violation]:
    """Phase 2: per-part constraints and isolation-barrier bridging."""
    out: list[Violation] = []
    for comp in c.components:
        if comp.part_type not in kg:
            continue
        entry = kg.entry(comp.part_type)
        if entry.isolation_groups:
            by_net: dict[str, list[tuple[int, str]]] = defaultdict(list)
            for kp in entry.pins:
                group = entry.group_of(kp.number)
                n = c.pin_net(comp.ref, kp.number)
                if group is not None and n is not None:
                    by_net[n].append((kp.number, group))
            for n, members in sorted(by_net.items()):
                if len({g for _, g in members}) >= 2:
                    names = tuple(entry.pin(num).name for num, _ in sorted(members))
                    out.append(make_violation(Phase.KG_CONSTRAINT, "isolation_bridge",
                                              comp.ref, names, (n,)))
        for decl in entry.constraints:
            out.extend(eval_constraint(decl, comp, c, kg))
    return sorted(out, key=_sort_key)


def run_phase12(c: Circuit, kg: KnowledgeGraph,
                external_nets: AbstractSet[str] = frozenset()) -> list[Violation]:
    return check_erc(c, kg, external_nets) + check_intra(c, kg)
