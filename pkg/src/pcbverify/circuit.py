"""Circuit model, the pin-labeled component/net bipartite graph, and the
canonical JSON interchange format."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping

from . import _jsonfmt
from .errors import CircuitError

REF_PATTERN = re.compile(r"[A-Z]+[0-9]+")

Endpoint = tuple[str, int]


@dataclass(frozen=True, order=True)
class PinId:
    number: int
    name: str


@dataclass(frozen=True)
class Component:
    ref: str
    part_type: str
    pins: tuple[PinId, ...]
    value: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "pins", tuple(sorted(self.pins)))

    def pin(self, number: int) -> PinId | None:
        for p in self.pins:
            if p.number == number:
                return p
        return None

    def pin_named(self, name: str) -> PinId | None:
        for p in self.pins:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class Net:
    name: str
    endpoints: tuple[Endpoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "endpoints", tuple(sorted(tuple(e) for e in self.endpoints)))


@dataclass(frozen=True)
class Circuit:
    """A validated, canonically ordered netlist.

    Components are sorted by ref, nets by name and endpoints by (ref, pin), so
    two circuits that differ only in declaration order compare equal.
    """

    components: tuple[Component, ...] = ()
    nets: tuple[Net, ...] = ()
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(sorted(self.components, key=lambda c: c.ref)))
        object.__setattr__(self, "nets", tuple(sorted(self.nets, key=lambda n: n.name)))
        object.__setattr__(self, "metadata", dict(sorted(dict(self.metadata).items())))
        _validate(self)

    @cached_property
    def _by_ref(self) -> dict[str, Component]:
        return {c.ref: c for c in self.components}

    @cached_property
    def _binding(self) -> dict[Endpoint, str]:
        return {ep: n.name for n in self.nets for ep in n.endpoints}

    @cached_property
    def _by_net(self) -> dict[str, Net]:
        return {n.name: n for n in self.nets}

    def component(self, ref: str) -> Component:
        try:
            return self._by_ref[ref]
        except KeyError:
            raise CircuitError(f"unknown component {ref!r}") from None

    def has_component(self, ref: str) -> bool:
        return ref in self._by_ref

    def net(self, name: str) -> Net | None:
        return self._by_net.get(name)

    @property
    def net_names(self) -> tuple[str, ...]:
        return tuple(n.name for n in self.nets)

    def pin_net(self, ref: str, number: int) -> str | None:
        """Like :func:`net_of` but without existence checks."""
        return self._binding.get((ref, number))

    # -- edits used by mutation fixtures and property tests --------------------

    def without_component(self, ref: str) -> Circuit:
        self.component(ref)
        nets = []
        for n in self.nets:
            eps = tuple(ep for ep in n.endpoints if ep[0] != ref)
            if eps:
                nets.append(Net(n.name, eps))
        comps = tuple(c for c in self.components if c.ref != ref)
        return Circuit(comps, tuple(nets), self.metadata)

    def with_pin_floated(self, ref: str, number: int) -> Circuit:
        net_of(self, ref, number)
        nets = []
        for n in self.nets:
            eps = tuple(ep for ep in n.endpoints if ep != (ref, number))
            if eps:
                nets.append(Net(n.name, eps))
        return Circuit(self.components, tuple(nets), self.metadata)

    def with_pin_moved(self, ref: str, number: int, net: str) -> Circuit:
        """Rebind a pin to ``net``, creating the net if it does not exist."""
        floated = self.with_pin_floated(ref, number)
        return floated.with_bindings({(ref, number): net})

    def with_bindings(self, bindings: Mapping[Endpoint, str]) -> Circuit:
        grouped: dict[str, list[Endpoint]] = {n.name: list(n.endpoints) for n in self.nets}
        for ep, name in bindings.items():
            grouped.setdefault(name, []).append(tuple(ep))
        nets = tuple(Net(name, tuple(eps)) for name, eps in grouped.items())
        return Circuit(self.components, nets, self.metadata)

    def with_component(self, comp: Component, bindings: Mapping[int, str]) -> Circuit:
        base = Circuit(self.components + (comp,), self.nets, self.metadata)
        return base.with_bindings({(comp.ref, pin): net for pin, net in bindings.items()})

    def next_ref(self, prefix: str) -> str:
        used = {int(c.ref[len(prefix):]) for c in self.components
                if c.ref.startswith(prefix) and c.ref[len(prefix):].isdigit()}
        i = 1
        while i in used:
            i += 1
        return f"{prefix}{i}"


@dataclass(frozen=True)
class BipartiteGraph:
    component_vertices: frozenset[str]
    net_vertices: frozenset[str]
    edges: frozenset[tuple[str, int, str]]


def _validate(c: Circuit) -> None:
    refs: dict[str, Component] = {}
    for i, comp in enumerate(c.components):
        locus = f"components[{i}]"
        if not isinstance(comp.ref, str) or not REF_PATTERN.fullmatch(comp.ref):
            raise CircuitError(f"bad designator {comp.ref!r}", locus)
        if comp.ref in refs:
            raise CircuitError(f"duplicate component ref {comp.ref!r}", locus)
        if not comp.part_type:
            raise CircuitError("empty part_type", locus)
        if not comp.pins:
            raise CircuitError(f"component {comp.ref} has no pins", locus)
        seen: set[int] = set()
        for j, p in enumerate(comp.pins):
            if not isinstance(p.number, int) or isinstance(p.number, bool) or p.number < 1:
                raise CircuitError(f"pin number must be a positive integer, got {p.number!r}",
                                   f"{locus}.pins[{j}]")
            if not p.name:
                raise CircuitError("empty pin name", f"{locus}.pins[{j}]")
            if p.number in seen:
                raise CircuitError(f"duplicate pin number {p.number} on {comp.ref}",
                                   f"{locus}.pins[{j}]")
            seen.add(p.number)
        refs[comp.ref] = comp

    names: set[str] = set()
    bound: dict[Endpoint, str] = {}
    for i, net in enumerate(c.nets):
        locus = f"nets[{i}]"
        if not net.name:
            raise CircuitError("empty net name", locus)
        if net.name in names:
            raise CircuitError(f"duplicate net name {net.name!r}", locus)
        names.add(net.name)
        for j, (ref, pin) in enumerate(net.endpoints):
            eloc = f"{locus}.endpoints[{j}]"
            comp = refs.get(ref)
            if comp is None:
                raise CircuitError(f"endpoint references unknown component {ref!r}", eloc)
            if comp.pin(pin) is None:
                raise CircuitError(f"endpoint references unknown pin {ref}.{pin}", eloc)
            if (ref, pin) in bound:
                if bound[(ref, pin)] == net.name:
                    raise CircuitError(f"duplicate endpoint {ref}.{pin} on net {net.name!r}", eloc)
                raise CircuitError(
                    f"pin bound to multiple nets: {ref}.{pin} on {bound[(ref, pin)]!r} "
                    f"and {net.name!r}", eloc)
            bound[(ref, pin)] = net.name


# -- canonical format ----------------------------------------------------------

def circuit_to_doc(c: Circuit) -> dict[str, Any]:
    comps = []
    for comp in c.components:
        d: dict[str, Any] = {"ref": comp.ref, "part_type": comp.part_type}
        if comp.value is not None:
            d["value"] = comp.value
        d["pins"] = [{"number": p.number, "name": p.name} for p in comp.pins]
        comps.append(d)
    nets = [{"name": n.name, "endpoints": [list(ep) for ep in n.endpoints]} for n in c.nets]
    return {"components": comps, "nets": nets, "metadata": dict(c.metadata)}


def _expect(cond: bool, message: str, locus: str) -> None:
    if not cond:
        raise CircuitError(message, locus)


def circuit_from_doc(doc: Any) -> Circuit:
    _expect(isinstance(doc, dict), "document must be a JSON object", "$")
    unknown = set(doc) - {"components", "nets", "metadata"}
    _expect(not unknown, f"unknown top-level keys {sorted(unknown)}", "$")
    raw_comps = doc.get("components", [])
    raw_nets = doc.get("nets", [])
    raw_meta = doc.get("metadata", {})
    _expect(isinstance(raw_comps, list), "components must be a list", "components")
    _expect(isinstance(raw_nets, list), "nets must be a list", "nets")
    _expect(isinstance(raw_meta, dict) and all(isinstance(v, str) for v in raw_meta.values()),
            "metadata must map keys to strings", "metadata")

    comps = []
    for i, rc in enumerate(raw_comps):
        loc = f"components[{i}]"
        _expect(isinstance(rc, dict), "component must be an object", loc)
        _expect(isinstance(rc.get("ref"), str), "missing string field 'ref'", loc)
        _expect(isinstance(rc.get("part_type"), str), "missing string field 'part_type'", loc)
        value = rc.get("value")
        _expect(value is None or isinstance(value, str), "'value' must be a string", loc)
        pins = rc.get("pins")
        _expect(isinstance(pins, list), "missing list field 'pins'", loc)
        parsed = []
        for j, rp in enumerate(pins):
            ploc = f"{loc}.pins[{j}]"
            _expect(isinstance(rp, dict) and isinstance(rp.get("number"), int)
                    and not isinstance(rp.get("number"), bool)
                    and isinstance(rp.get("name"), str),
                    "pin must be {number: int, name: str}", ploc)
            parsed.append(PinId(rp["number"], rp["name"]))
        comps.append(Component(rc["ref"], rc["part_type"], tuple(parsed), value))

    nets = []
    for i, rn in enumerate(raw_nets):
        loc = f"nets[{i}]"
        _expect(isinstance(rn, dict) and isinstance(rn.get("name"), str),
                "net must have a string 'name'", loc)
        eps = rn.get("endpoints")
        _expect(isinstance(eps, list), "missing list field 'endpoints'", loc)
        parsed_eps = []
        for j, ep in enumerate(eps):
            _expect(isinstance(ep, list) and len(ep) == 2 and isinstance(ep[0], str)
                    and isinstance(ep[1], int) and not isinstance(ep[1], bool),
                    "endpoint must be [ref, pin_number]", f"{loc}.endpoints[{j}]")
            parsed_eps.append((ep[0], ep[1]))
        # duplicates are collapsed by sorting otherwise, so check here
        _expect(len(set(parsed_eps)) == len(parsed_eps),
                f"duplicate endpoint on net {rn['name']!r}", f"{loc}.endpoints")
        nets.append(Net(rn["name"], tuple(parsed_eps)))

    # positional loci refer to the document, so validate before sorting
    _validate_in_order(comps, nets)
    return Circuit(tuple(comps), tuple(nets), raw_meta)


def _validate_in_order(comps: list[Component], nets: list[Net]) -> None:
    stub = object.__new__(Circuit)
    object.__setattr__(stub, "components", tuple(comps))
    object.__setattr__(stub, "nets", tuple(nets))
    _validate(stub)


def parse_circuit(data: bytes | str) -> Circuit:
    """Parse a canonical circuit document.

    Raises :class:`CircuitError` carrying a line (for JSON syntax errors) or a
    field path (for structural errors).
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise CircuitError(f"not UTF-8: {e.reason}", f"byte {e.start}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise CircuitError(f"malformed document: {e.msg}", f"line {e.lineno}") from None
    return circuit_from_doc(doc)


def serialize_circuit(c: Circuit) -> bytes:
    return _jsonfmt.dump_bytes(circuit_to_doc(c))


def build_bipartite_graph(c: Circuit) -> BipartiteGraph:
    edges = frozenset((ref, pin, n.name) for n in c.nets for ref, pin in n.endpoints)
    return BipartiteGraph(
        frozenset(comp.ref for comp in c.components),
        frozenset(n.name for n in c.nets),
        edges,
    )


def net_of(c: Circuit, ref: str, pin: int) -> str | None:
    """Net bound to ``ref.pin``, or None for a floating pin."""
    comp = c.component(ref)
    if comp.pin(pin) is None:
        raise CircuitError(f"unknown pin {ref}.{pin}")
    return c.pin_net(ref, pin)


def make_component(ref: str, part_type: str, pins: Iterable[tuple[int, str]],
                   value: str | None = None) -> Component:
    return Component(ref, part_type, tuple(PinId(n, name) for n, name in pins), value)

