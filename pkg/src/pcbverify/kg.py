"""Datasheet knowledge graph: pin-role ontology, per-part constraint
declarations, attributes and isolation groups."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping

from . import _jsonfmt
from .errors import KGError


class PinRole(str, Enum):
    SUPPLY_VDD = "supply_vdd"
    SUPPLY_GND = "supply_gnd"
    PRIMARY_VDD = "primary_vdd"
    PRIMARY_GND = "primary_gnd"
    SECONDARY_VDD = "secondary_vdd"
    SECONDARY_GND = "secondary_gnd"
    SENSE_PLUS = "sense_plus"
    SENSE_MINUS = "sense_minus"
    OUT = "out"
    OUT_PLUS = "out_plus"
    OUT_MINUS = "out_minus"
    LOGIC_IN = "logic_in"
    LOGIC_OUT = "logic_out"
    PASSIVE_TERMINAL = "passive_terminal"
    DIODE_ANODE = "diode_anode"
    DIODE_CATHODE = "diode_cathode"
    BUCK_VIN = "buck_vin"
    BUCK_GND = "buck_gnd"
    BUCK_SW = "buck_sw"
    BUCK_FB = "buck_fb"
    BUCK_EN = "buck_en"
    BUCK_BOOT = "buck_boot"
    HALFBRIDGE_HB = "halfbridge_hb"
    HALFBRIDGE_HS = "halfbridge_hs"
    GATE_HO = "gate_ho"
    GATE_LO = "gate_lo"
    MOSFET_GATE = "mosfet_gate"
    MOSFET_DRAIN = "mosfet_drain"
    MOSFET_SOURCE = "mosfet_source"
    MOSFET_KELVIN_SOURCE = "mosfet_kelvin_source"
    XFMR_PRIMARY = "xfmr_primary"
    XFMR_SECONDARY = "xfmr_secondary"

    def __str__(self) -> str:
        return self.value


# Held back so documents using them fail loudly instead of being misread.
RESERVED_ROLES = frozenset({"role_reserved_1", "role_reserved_2"})

SUPPLY_ROLES = frozenset({
    PinRole.SUPPLY_VDD, PinRole.SUPPLY_GND,
    PinRole.PRIMARY_VDD, PinRole.PRIMARY_GND,
    PinRole.SECONDARY_VDD, PinRole.SECONDARY_GND,
})
ISOLATED_ROLES = frozenset({
    PinRole.PRIMARY_VDD, PinRole.PRIMARY_GND,
    PinRole.SECONDARY_VDD, PinRole.SECONDARY_GND,
})
VDD_ROLES = frozenset(r for r in PinRole if r.value.endswith("_vdd"))
GND_ROLES = frozenset(r for r in PinRole if r.value.endswith("_gnd"))


class ConstraintKind(str, Enum):
    SUPPLY_PAIR = "supply_pair"
    MUST_BE_CONNECTED = "must_be_connected"
    DRIVING_PAIR = "driving_pair"
    DIFFERENTIAL_PAIR_MUST_BE_DISTINCT = "differential_pair_must_be_distinct"

    def __str__(self) -> str:
        return self.value


def _arity_ok(kind: ConstraintKind, n: int) -> bool:
    if kind in (ConstraintKind.SUPPLY_PAIR, ConstraintKind.DIFFERENTIAL_PAIR_MUST_BE_DISTINCT):
        return n == 2
    if kind is ConstraintKind.DRIVING_PAIR:
        return n == 1
    return n >= 1


_ARITY_TEXT = {
    ConstraintKind.SUPPLY_PAIR: "2",
    ConstraintKind.DIFFERENTIAL_PAIR_MUST_BE_DISTINCT: "2",
    ConstraintKind.DRIVING_PAIR: "1",
    ConstraintKind.MUST_BE_CONNECTED: ">=1",
}


@dataclass(frozen=True)
class ConstraintDecl:
    kind: ConstraintKind
    pins: tuple[str, ...]


@dataclass(frozen=True)
class KGPin:
    number: int
    name: str
    role: PinRole


@dataclass(frozen=True)
class PartEntry:
    part_type: str
    pins: tuple[KGPin, ...]
    constraints: tuple[ConstraintDecl, ...] = ()
    attributes: Mapping[str, str] = field(default_factory=dict)
    isolation_groups: Mapping[str, tuple[int, ...]] | None = None

    def pin(self, number: int) -> KGPin | None:
        for p in self.pins:
            if p.number == number:
                return p
        return None

    def pin_named(self, name: str) -> KGPin | None:
        for p in self.pins:
            if p.name == name:
                return p
        return None

    def group_of(self, number: int) -> str | None:
        for name, members in (self.isolation_groups or {}).items():
            if number in members:
                return name
        return None


@dataclass(frozen=True)
class KnowledgeGraph:
    entries: Mapping[str, PartEntry] = field(default_factory=dict)

    def __contains__(self, part_type: str) -> bool:
        return part_type in self.entries

    def entry(self, part_type: str) -> PartEntry:
        try:
            return self.entries[part_type]
        except KeyError:
            raise KGError(f"unknown part type {part_type!r}") from None

    def subset(self, part_types) -> KnowledgeGraph:
        return KnowledgeGraph({k: self.entries[k] for k in sorted(part_types)})


@dataclass(frozen=True, order=True)
class Diagnostic:
    part_type: str
    code: str
    message: str


# -- loading -------------------------------------------------------------------

def _fail(message: str, locus: str) -> None:
    raise KGError(message, locus)


def _parse_role(raw: Any, locus: str) -> PinRole:
    if raw in RESERVED_ROLES:
        _fail(f"reserved pin role {raw!r}", locus)
    try:
        return PinRole(raw)
    except ValueError:
        _fail(f"unknown pin role {raw!r}", locus)


def entry_from_doc(part_type: str, raw: Any) -> PartEntry:
    loc = f"parts.{part_type}"
    if not isinstance(raw, dict):
        _fail("part entry must be an object", loc)
    unknown = set(raw) - {"pins", "constraints", "attributes", "isolation_groups"}
    if unknown:
        _fail(f"unknown keys {sorted(unknown)}", loc)

    raw_pins = raw.get("pins")
    if not isinstance(raw_pins, list) or not raw_pins:
        _fail("part needs a non-empty 'pins' list", loc)
    pins: list[KGPin] = []
    numbers: set[int] = set()
    names: set[str] = set()
    for i, rp in enumerate(raw_pins):
        ploc = f"{loc}.pins[{i}]"
        if not (isinstance(rp, dict) and isinstance(rp.get("number"), int)
                and not isinstance(rp.get("number"), bool) and rp["number"] >= 1
                and isinstance(rp.get("name"), str) and rp["name"]):
            _fail("pin must be {number: positive int, name: str, role: str}", ploc)
        if rp["number"] in numbers:
            _fail(f"duplicate pin number {rp['number']}", ploc)
        if rp["name"] in names:
            _fail(f"duplicate pin name {rp['name']!r}", ploc)
        numbers.add(rp["number"])
        names.add(rp["name"])
        pins.append(KGPin(rp["number"], rp["name"], _parse_role(rp.get("role"), f"{ploc}.role")))

    constraints: list[ConstraintDecl] = []
    for i, rc in enumerate(raw.get("constraints", [])):
        cloc = f"{loc}.constraints[{i}]"
        if not isinstance(rc, dict) or not isinstance(rc.get("pins"), list):
            _fail("constraint must be {kind: str, pins: [names]}", cloc)
        try:
            kind = ConstraintKind(rc.get("kind"))
        except ValueError:
            _fail(f"unknown constraint kind {rc.get('kind')!r}", cloc)
        cpins = tuple(rc["pins"])
        if not _arity_ok(kind, len(cpins)):
            _fail(f"constraint arity violation: {kind.value} takes {_ARITY_TEXT[kind]} "
                  f"pin(s), got {len(cpins)}", cloc)
        for name in cpins:
            if name not in names:
                _fail(f"constraint names nonexistent pin {name!r}", cloc)
        constraints.append(ConstraintDecl(kind, cpins))

    attrs = raw.get("attributes", {})
    if not isinstance(attrs, dict) or not all(isinstance(v, str) for v in attrs.values()):
        _fail("attributes must map keys to strings", f"{loc}.attributes")

    groups = raw.get("isolation_groups")
    if groups is not None:
        gloc = f"{loc}.isolation_groups"
        if not isinstance(groups, dict) or len(groups) < 2:
            _fail("isolation groups need at least two named groups", gloc)
        seen: set[int] = set()
        parsed: dict[str, tuple[int, ...]] = {}
        for gname, members in groups.items():
            if not isinstance(members, list) or not members:
                _fail(f"group {gname!r} must be a non-empty list of pin numbers", gloc)
            for m in members:
                if m not in numbers:
                    _fail(f"group {gname!r} names unknown pin {m!r}", gloc)
                if m in seen:
                    _fail(f"pin {m} appears in more than one isolation group", gloc)
                seen.add(m)
            parsed[gname] = tuple(sorted(members))
        groups = dict(sorted(parsed.items()))

    return PartEntry(
        part_type,
        tuple(sorted(pins, key=lambda p: p.number)),
        tuple(constraints),
        dict(sorted(attrs.items())),
        groups,
    )


def kg_from_doc(doc: Any) -> KnowledgeGraph:
    if not isinstance(doc, dict) or not isinstance(doc.get("parts"), dict):
        _fail("document must be {\"parts\": {...}}", "$")
    return KnowledgeGraph({pt: entry_from_doc(pt, raw) for pt, raw in sorted(doc["parts"].items())})


def parse_kg(data: bytes | str) -> KnowledgeGraph:
    """Load a KG document. Unknown roles, kinds and bad arities are rejected."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise KGError(f"not UTF-8: {e.reason}", f"byte {e.start}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise KGError(f"malformed document: {e.msg}", f"line {e.lineno}") from None
    return kg_from_doc(doc)


def entry_to_doc(entry: PartEntry) -> dict[str, Any]:
    d: dict[str, Any] = {
        "pins": [{"number": p.number, "name": p.name, "role": p.role.value} for p in entry.pins],
        "constraints": [{"kind": c.kind.value, "pins": list(c.pins)} for c in entry.constraints],
        "attributes": dict(entry.attributes),
    }
    if entry.isolation_groups is not None:
        d["isolation_groups"] = {k: list(v) for k, v in entry.isolation_groups.items()}
    return d


def serialize_kg(kg: KnowledgeGraph) -> bytes:
    return _jsonfmt.dump_bytes({"parts": {pt: entry_to_doc(e) for pt, e in sorted(kg.entries.items())}})


# -- queries ---------------------------------------------------------------------

def role_of(kg: KnowledgeGraph, part_type: str, pin: int) -> PinRole:
    p = kg.entry(part_type).pin(pin)
    if p is None:
        raise KGError(f"unknown pin {pin} on part {part_type!r}")
    return p.role


def lint_kg(kg: KnowledgeGraph) -> list[Diagnostic]:
    """Authoring checks; an empty list means the KG is clean."""
    out: list[Diagnostic] = []
    for pt in sorted(kg.entries):
        e = kg.entries[pt]
        paired = {n for c in e.constraints if c.kind is ConstraintKind.SUPPLY_PAIR for n in c.pins}
        driven = {n for c in e.constraints if c.kind is ConstraintKind.DRIVING_PAIR for n in c.pins}
        for p in e.pins:
            if p.role in SUPPLY_ROLES and p.name not in paired:
                out.append(Diagnostic(pt, "supply_pin_unpaired",
                                      f"{pt}: supply pin {p.name} lacks a supply_pair constraint"))
        if e.isolation_groups is None and any(p.role in ISOLATED_ROLES for p in e.pins):
            out.append(Diagnostic(pt, "isolation_groups_missing",
                                  f"{pt}: isolated part lacks isolation groups"))
        for p in e.pins:
            if p.role is PinRole.MOSFET_GATE and p.name not in driven:
                out.append(Diagnostic(pt, "gate_undriven",
                                      f"{pt}: gate pin {p.name} lacks a driving_pair constraint"))
    return out


_TOKEN_SPLIT = re.compile(r'[\s{}\[\]:,"]+')


def token_footprint(entry: PartEntry) -> int:
    """Tokens in the entry's canonical serialization, splitting on whitespace
    and JSON structural punctuation."""
    text = _jsonfmt.dumps({entry.part_type: entry_to_doc(entry)})
    return sum(1 for t in _TOKEN_SPLIT.split(text) if t)


def mean_footprint(kg: KnowledgeGraph) -> float:
    if not kg.entries:
        return 0.0
    return sum(token_footprint(e) for e in kg.entries.values()) / len(kg.entries)
