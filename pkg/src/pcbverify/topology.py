"""Phases 3 and 4: pairwise rules over resolved endpoints, the reduced
net-role graph, primitive inference, skeleton matching and semantic checks."""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Any, Iterable, Mapping

from . import _jsonfmt
from .circuit import REF_PATTERN, Circuit, Component
from .constraints import Phase, Violation, check_erc, check_intra
from .errors import TemplateError
from .kg import GND_ROLES, VDD_ROLES, KnowledgeGraph, PinRole
from .matcher import BudgetExceeded, find_monomorphism

DEFAULT_PASSIVES = frozenset({"R", "C", "L", "D", "C_film"})
DEFAULT_BUDGET = 1_000_000

PASSIVE_KINDS = ("capacitor", "resistor", "inductor", "diode")
DEVICE_EDGE_TYPES = ("switch", "winding", "direct")
EDGE_TYPES = frozenset(PASSIVE_KINDS + DEVICE_EDGE_TYPES)
DIRECTED_EDGE_TYPES = frozenset({"diode", "switch"})
VERTEX_KINDS = frozenset({"port", "switch_node", "role_class", "any"})
# conductive at DC, so a path of these joins two isolation domains
DC_KINDS = frozenset({"resistor", "inductor", "diode"})


# -- endpoints -------------------------------------------------------------------

@dataclass(frozen=True)
class Endpoint:
    tag: str  # "pin", "role" or "net"
    target: str
    pin: str | None = None

    @property
    def label(self) -> str:
        if self.tag == "pin":
            return f"{self.target}.{self.pin}"
        return self.target

    def __str__(self) -> str:
        if self.tag == "pin":
            return self.label
        return f"{self.tag}:{self.target}"


def parse_endpoint(text: str) -> Endpoint:
    """Parse ``"REF.PIN"``, ``"role:<role>"`` or ``"net:<name>"``.

    Raises ValueError for malformed text or an unknown role.
    """
    if not isinstance(text, str) or not text:
        raise ValueError(f"endpoint must be a non-empty string, got {text!r}")
    if text.startswith("role:"):
        role = text[5:]
        try:
            PinRole(role)
        except ValueError:
            raise ValueError(f"unknown pin role {role!r} in endpoint {text!r}") from None
        return Endpoint("role", role)
    if text.startswith("net:"):
        if not text[4:]:
            raise ValueError(f"empty net name in endpoint {text!r}")
        return Endpoint("net", text[4:])
    ref, dot, pin = text.partition(".")
    if not dot or not pin or not REF_PATTERN.fullmatch(ref):
        raise ValueError(f"malformed endpoint {text!r}")
    return Endpoint("pin", ref, pin)


def _pin_of(comp: Component, kg: KnowledgeGraph | None, name: str) -> int | None:
    p = comp.pin_named(name)
    if p is not None:
        return p.number
    if kg is not None and comp.part_type in kg:
        kp = kg.entry(comp.part_type).pin_named(name)
        if kp is not None and comp.pin(kp.number) is not None:
            return kp.number
    if name.isdigit() and comp.pin(int(name)) is not None:
        return int(name)
    return None


def role_nets(c: Circuit, kg: KnowledgeGraph, role: PinRole | str) -> frozenset[str]:
    role = PinRole(role)
    out = set()
    for comp in c.components:
        if comp.part_type not in kg:
            continue
        for kp in kg.entry(comp.part_type).pins:
            if kp.role is role:
                n = c.pin_net(comp.ref, kp.number)
                if n is not None:
                    out.add(n)
    return frozenset(out)


def resolve_endpoint(ep: Endpoint | str, c: Circuit, kg: KnowledgeGraph) -> frozenset[str]:
    """Nets an endpoint refers to; empty when it names nothing in ``c``."""
    if isinstance(ep, str):
        ep = parse_endpoint(ep)
    if ep.tag == "role":
        return role_nets(c, kg, ep.target)
    if ep.tag == "net":
        return frozenset({ep.target}) if c.net(ep.target) is not None else frozenset()
    if not c.has_component(ep.target):
        return frozenset()
    comp = c.component(ep.target)
    number = _pin_of(comp, kg, ep.pin)
    if number is None:
        return frozenset()
    n = c.pin_net(comp.ref, number)
    return frozenset() if n is None else frozenset({n})


# -- reduced net-role graph --------------------------------------------------------

@dataclass(frozen=True, order=True)
class ViaEdge:
    a: str
    b: str
    kind: str
    ref: str


@dataclass(frozen=True)
class RoleGraph:
    net_roles: Mapping[str, tuple[str, ...]]
    vias: tuple[ViaEdge, ...]
    self_loops: tuple[str, ...]
    device_edges: tuple[ViaEdge, ...]

    @property
    def nets(self) -> tuple[str, ...]:
        return tuple(self.net_roles)

    def host_edges(self) -> list[tuple[str, str, str]]:
        return [(e.a, e.b, e.kind) for e in self.vias + self.device_edges]

    def nets_with_roles(self, roles: Iterable[PinRole]) -> frozenset[str]:
        wanted = {PinRole(r).value for r in roles}
        return frozenset(n for n, rs in self.net_roles.items() if wanted.intersection(rs))

    def via_count(self, kind: str, a: str, b: str) -> int:
        """Number of ``kind`` vias joining ``a`` and ``b`` (oriented for diodes)."""
        if kind in DIRECTED_EDGE_TYPES:
            return sum(1 for e in self.vias if e.kind == kind and (e.a, e.b) == (a, b))
        return sum(1 for e in self.vias if e.kind == kind and {e.a, e.b} == {a, b} and a != b)


def passive_kind(comp: Component, kg: KnowledgeGraph, passives: frozenset[str]) -> str | None:
    if comp.part_type not in passives or comp.part_type not in kg:
        return None
    kind = kg.entry(comp.part_type).attributes.get("passive_kind")
    return kind if kind in PASSIVE_KINDS else None


def _bound_by_role(comp: Component, c: Circuit, kg: KnowledgeGraph) -> dict[PinRole, list[str]]:
    out: dict[PinRole, list[str]] = defaultdict(list)
    for kp in kg.entry(comp.part_type).pins:
        n = c.pin_net(comp.ref, kp.number)
        if n is not None:
            out[kp.role].append(n)
    return out


def build_topology_graph(c: Circuit, kg: KnowledgeGraph,
                         passives: Iterable[str] = DEFAULT_PASSIVES) -> RoleGraph:
    passives = frozenset(passives)
    roles: dict[str, list[str]] = {n.name: [] for n in c.nets}
    vias: list[ViaEdge] = []
    loops: list[str] = []
    devices: list[ViaEdge] = []
    for comp in c.components:
        known = comp.part_type in kg
        if known:
            for kp in kg.entry(comp.part_type).pins:
                n = c.pin_net(comp.ref, kp.number)
                if n is not None:
                    roles[n].append(kp.role.value)
        touched = sorted({n for p in comp.pins if (n := c.pin_net(comp.ref, p.number)) is not None})
        for a, b in combinations(touched, 2):
            devices.append(ViaEdge(a, b, "direct", comp.ref))
        if not known:
            continue
        kind = passive_kind(comp, kg, passives)
        by_role = _bound_by_role(comp, c, kg)
        if kind is not None:
            if len(touched) == 1:
                loops.append(comp.ref)
            elif len(touched) == 2:
                a, b = touched
                if kind == "diode":
                    anode = by_role.get(PinRole.DIODE_ANODE, [])
                    cathode = by_role.get(PinRole.DIODE_CATHODE, [])
                    if len(anode) == 1 and len(cathode) == 1:
                        a, b = anode[0], cathode[0]
                vias.append(ViaEdge(a, b, kind, comp.ref))
            continue
        for d in sorted(set(by_role.get(PinRole.MOSFET_DRAIN, []))):
            for s in sorted(set(by_role.get(PinRole.MOSFET_SOURCE, []))):
                if d != s:
                    devices.append(ViaEdge(d, s, "switch", comp.ref))
        for role in (PinRole.XFMR_PRIMARY, PinRole.XFMR_SECONDARY):
            for a, b in combinations(sorted(set(by_role.get(role, []))), 2):
                devices.append(ViaEdge(a, b, "winding", comp.ref))
    return RoleGraph(
        {n: tuple(sorted(rs)) for n, rs in sorted(roles.items())},
        tuple(sorted(vias)),
        tuple(sorted(loops)),
        tuple(sorted(devices)),
    )


# -- pairwise rules ----------------------------------------------------------------

class RuleType(str, Enum):
    C_DIRECT = "C_DIRECT"
    R_SERIES = "R_SERIES"
    L_SERIES = "L_SERIES"
    CONNECTED = "CONNECTED"
    DISTINCT = "DISTINCT"
    DIODE_FORWARD = "DIODE_FORWARD"

    def __str__(self) -> str:
        return self.value


_VIA_OF_RULE = {
    RuleType.C_DIRECT: "capacitor",
    RuleType.R_SERIES: "resistor",
    RuleType.L_SERIES: "inductor",
    RuleType.DIODE_FORWARD: "diode",
}


@dataclass(frozen=True)
class PairRule:
    tau: RuleType
    a: Endpoint
    b: Endpoint
    min_count: int = 1

    def __post_init__(self):
        if self.min_count < 1:
            raise ValueError("min_count must be positive")
        if self.tau is RuleType.DISTINCT and self.a == self.b:
            raise ValueError("DISTINCT rule needs two different endpoints")


def _rule_violation(index: int, r: PairRule, nets: Iterable[str], code: str, message: str) -> Violation:
    return Violation(Phase.TOPOLOGY, code, f"rules[{index}]", (str(r.a), str(r.b)),
                     tuple(sorted(set(nets))), message)


def eval_rule(r: PairRule, g: RoleGraph, na: frozenset[str], nb: frozenset[str],
              index: int = 0) -> Violation | None:
    """Check one rule on already-resolved endpoint net sets."""
    for ep, resolved in ((r.a, na), (r.b, nb)):
        if not resolved:
            return _rule_violation(index, r, (), "unresolved_endpoint",
                                   f"{r.tau} endpoint {ep} resolves to no net")
    if r.tau is RuleType.DISTINCT:
        shared = na & nb
        if shared:
            return _rule_violation(index, r, shared, r.tau.value,
                                   f"DISTINCT violated between {r.a.label} and {r.b.label} "
                                   f"(shared nets {sorted(shared)!r})")
        return None
    if r.tau is RuleType.CONNECTED:
        found, needed = (1 if na & nb else 0), 1
    else:
        kind = _VIA_OF_RULE[r.tau]
        found = max(g.via_count(kind, x, y) for x in sorted(na) for y in sorted(nb))
        needed = r.min_count
    if found >= needed:
        return None
    msg = (f"{r.tau} missing between {r.a.label} and {r.b.label} "
           f"(nets {sorted(na)!r} vs {sorted(nb)!r})")
    if needed > 1:
        msg += f"; found {found} of {needed}"
    return _rule_violation(index, r, na | nb, r.tau.value, msg)


# -- primitives --------------------------------------------------------------------

class PrimitiveKind(str, Enum):
    HALF_BRIDGE = "half_bridge"
    LC_FILTER = "lc_filter"
    DECOUPLING_CAP = "decoupling_cap"
    BOOTSTRAP_CELL = "bootstrap_cell"
    XFMR_LINK = "xfmr_link"
    GATE_DRIVE_CELL = "gate_drive_cell"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True)
class Primitive:
    kind: PrimitiveKind
    members: tuple[str, ...]
    anchor_nets: tuple[str, ...]


def _half_bridges(c: Circuit, kg: KnowledgeGraph) -> list[Primitive]:
    fets = []
    for comp in c.components:
        if comp.part_type not in kg:
            continue
        by_role = _bound_by_role(comp, c, kg)
        drains = set(by_role.get(PinRole.MOSFET_DRAIN, []))
        sources = set(by_role.get(PinRole.MOSFET_SOURCE, []))
        if drains and sources:
            fets.append((comp.ref, drains, sources))
    out = []
    for hi, hi_d, hi_s in fets:
        for lo, lo_d, lo_s in fets:
            if hi == lo:
                continue
            for sw in sorted(hi_s & lo_d):
                for rail_hi in sorted(hi_d):
                    for rail_lo in sorted(lo_s):
                        if len({sw, rail_hi, rail_lo}) == 3:
                            out.append(Primitive(PrimitiveKind.HALF_BRIDGE, (hi, lo),
                                                 (sw, rail_hi, rail_lo)))
    return out


def infer_primitives(g: RoleGraph, c: Circuit, kg: KnowledgeGraph) -> tuple[Primitive, ...]:
    """Detect building blocks by role pattern. Result is sorted and duplicate-free."""
    found = set(_half_bridges(c, kg))
    hbs = [p for p in found if p.kind is PrimitiveKind.HALF_BRIDGE]
    sw_nets = {p.anchor_nets[0] for p in hbs} | g.nets_with_roles([PinRole.BUCK_SW])
    ground = g.nets_with_roles(GND_ROLES) | {p.anchor_nets[2] for p in hbs}
    supply = (g.nets_with_roles(VDD_ROLES | {PinRole.BUCK_VIN})
              | {p.anchor_nets[1] for p in hbs})
    caps = [e for e in g.vias if e.kind == "capacitor"]

    for e in caps:
        for x, y in ((e.a, e.b), (e.b, e.a)):
            if x in supply and y in ground:
                found.add(Primitive(PrimitiveKind.DECOUPLING_CAP, (e.ref,), (x, y)))

    for ind in (e for e in g.vias if e.kind == "inductor"):
        for sw, out in ((ind.a, ind.b), (ind.b, ind.a)):
            if sw not in sw_nets:
                continue
            for cap in caps:
                other = {cap.a, cap.b} - {out}
                if out in (cap.a, cap.b) and len(other) == 1 and other <= ground:
                    found.add(Primitive(PrimitiveKind.LC_FILTER, (ind.ref, cap.ref), (sw, out)))

    boot_pairs = [
        (g.nets_with_roles([PinRole.HALFBRIDGE_HB]), g.nets_with_roles([PinRole.HALFBRIDGE_HS])),
        (g.nets_with_roles([PinRole.BUCK_BOOT]), g.nets_with_roles([PinRole.BUCK_SW])),
    ]
    for hb_nets, hs_nets in boot_pairs:
        for cap in caps:
            for x, y in ((cap.a, cap.b), (cap.b, cap.a)):
                if x in hb_nets and y in hs_nets:
                    found.add(Primitive(PrimitiveKind.BOOTSTRAP_CELL, (cap.ref,), (x, y)))

    drive = g.nets_with_roles([PinRole.GATE_HO, PinRole.GATE_LO])
    gates = g.nets_with_roles([PinRole.MOSFET_GATE])
    for r in (e for e in g.vias if e.kind == "resistor"):
        for x, y in ((r.a, r.b), (r.b, r.a)):
            if x in drive and y in gates:
                found.add(Primitive(PrimitiveKind.GATE_DRIVE_CELL, (r.ref,), (x, y)))

    for comp in c.components:
        if comp.part_type not in kg:
            continue
        by_role = _bound_by_role(comp, c, kg)
        pri = sorted(set(by_role.get(PinRole.XFMR_PRIMARY, [])))
        sec = sorted(set(by_role.get(PinRole.XFMR_SECONDARY, [])))
        if pri and sec:
            found.add(Primitive(PrimitiveKind.XFMR_LINK, (comp.ref,), tuple(pri + sec)))
    return tuple(sorted(found))


# -- templates ---------------------------------------------------------------------

@dataclass(frozen=True)
class SkeletonVertex:
    id: str
    kind: str
    bind: str | None = None


@dataclass(frozen=True)
class SkeletonEdge:
    a: str
    b: str
    type: str


@dataclass(frozen=True)
class Skeleton:
    vertices: tuple[SkeletonVertex, ...] = ()
    edges: tuple[SkeletonEdge, ...] = ()

    def vertex(self, vid: str) -> SkeletonVertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)


@dataclass(frozen=True)
class SemanticConstraint:
    kind: str
    args: Mapping[str, Any] = field(default_factory=dict)

    def describe(self) -> str:
        if self.kind == "port_reaches_port_via":
            return f"{self.kind}({self.args['a']}, {self.args['b']} via {'/'.join(self.args['via'])})"
        if self.kind == "primitive_count_at_least":
            return f"{self.kind}({self.args['primitive']}, {self.args['n']})"
        return f"{self.kind}({self.args['a']}, {self.args['b']})"


SEMANTIC_KINDS = frozenset({"port_reaches_port_via", "primitive_count_at_least",
                            "nets_in_distinct_isolation"})


@dataclass(frozen=True)
class Tolerance:
    budget: int = DEFAULT_BUDGET


@dataclass(frozen=True)
class SystemTemplate:
    name: str
    ports: Mapping[str, Endpoint] = field(default_factory=dict)
    rules: tuple[PairRule, ...] = ()
    skeleton: Skeleton = Skeleton()
    semantic_constraints: tuple[SemanticConstraint, ...] = ()
    passive_set: frozenset[str] = DEFAULT_PASSIVES
    tolerance: Tolerance = Tolerance()


def _tfail(message: str, locus: str):
    raise TemplateError(message, locus)


def _endpoint(text: Any, locus: str) -> Endpoint:
    try:
        return parse_endpoint(text)
    except ValueError as e:
        _tfail(str(e), locus)


def _check_skeleton(sk: Skeleton, ports: Mapping[str, Endpoint]) -> None:
    ids = [v.id for v in sk.vertices]
    if len(set(ids)) != len(ids):
        _tfail("duplicate skeleton vertex id", "skeleton.vertices")
    for i, v in enumerate(sk.vertices):
        loc = f"skeleton.vertices[{i}]"
        if v.kind not in VERTEX_KINDS:
            _tfail(f"unknown vertex kind {v.kind!r}", loc)
        if v.kind == "port" and v.bind not in ports:
            _tfail(f"port vertex binds unknown port {v.bind!r}", loc)
        if v.kind == "role_class":
            try:
                PinRole(v.bind)
            except ValueError:
                _tfail(f"unknown pin role {v.bind!r}", loc)
    for i, e in enumerate(sk.edges):
        loc = f"skeleton.edges[{i}]"
        if e.type not in EDGE_TYPES:
            _tfail(f"unknown edge type {e.type!r}", loc)
        if e.a not in ids or e.b not in ids:
            _tfail("edge names an unknown vertex", loc)
    if len(ids) > 1:
        adj: dict[str, set[str]] = {v: set() for v in ids}
        for e in sk.edges:
            adj[e.a].add(e.b)
            adj[e.b].add(e.a)
        seen, todo = {ids[0]}, [ids[0]]
        while todo:
            for w in adj[todo.pop()] - seen:
                seen.add(w)
                todo.append(w)
        if len(seen) != len(ids):
            _tfail("skeleton is not connected", "skeleton")


def _semantic_from_doc(raw: Any, ports: Mapping[str, Endpoint], locus: str) -> SemanticConstraint:
    if not isinstance(raw, dict) or raw.get("kind") not in SEMANTIC_KINDS:
        _tfail(f"unknown semantic constraint {raw!r}", locus)
    kind = raw["kind"]
    args = {k: v for k, v in raw.items() if k != "kind"}
    if kind == "primitive_count_at_least":
        try:
            PrimitiveKind(args.get("primitive"))
        except ValueError:
            _tfail(f"unknown primitive {args.get('primitive')!r}", locus)
        if not isinstance(args.get("n"), int) or args["n"] < 1:
            _tfail("n must be a positive integer", locus)
        return SemanticConstraint(kind, {"primitive": args["primitive"], "n": args["n"]})
    for key in ("a", "b"):
        if args.get(key) not in ports:
            _tfail(f"semantic constraint names unknown port {args.get(key)!r}", locus)
    if kind == "port_reaches_port_via":
        via = args.get("via")
        if not isinstance(via, list) or not via or any(v not in EDGE_TYPES for v in via):
            _tfail(f"'via' must list edge types from {sorted(EDGE_TYPES)}", locus)
        return SemanticConstraint(kind, {"a": args["a"], "b": args["b"], "via": tuple(via)})
    return SemanticConstraint(kind, {"a": args["a"], "b": args["b"]})


def template_from_doc(doc: Any) -> SystemTemplate:
    if not isinstance(doc, dict) or not isinstance(doc.get("name"), str):
        _tfail("template must be an object with a string 'name'", "$")
    unknown = set(doc) - {"name", "ports", "rules", "skeleton", "semantic_constraints",
                          "passive_set", "tolerance"}
    if unknown:
        _tfail(f"unknown keys {sorted(unknown)}", "$")
    raw_ports = doc.get("ports", {})
    if not isinstance(raw_ports, dict):
        _tfail("ports must be an object", "ports")
    ports = {k: _endpoint(v, f"ports.{k}") for k, v in raw_ports.items()}

    rules = []
    for i, rr in enumerate(doc.get("rules", [])):
        loc = f"rules[{i}]"
        if not isinstance(rr, dict):
            _tfail("rule must be an object", loc)
        try:
            tau = RuleType(rr.get("tau"))
        except ValueError:
            _tfail(f"unknown rule type {rr.get('tau')!r}", loc)
        mc = rr.get("min_count", 1)
        if not isinstance(mc, int) or isinstance(mc, bool) or mc < 1:
            _tfail("min_count must be a positive integer", loc)
        try:
            rules.append(PairRule(tau, _endpoint(rr.get("a"), f"{loc}.a"),
                                  _endpoint(rr.get("b"), f"{loc}.b"), mc))
        except ValueError as e:
            _tfail(str(e), loc)

    raw_sk = doc.get("skeleton", {"vertices": [], "edges": []})
    if not isinstance(raw_sk, dict):
        _tfail("skeleton must be an object", "skeleton")
    verts, edges = [], []
    for i, rv in enumerate(raw_sk.get("vertices", [])):
        if not isinstance(rv, dict) or not isinstance(rv.get("id"), str):
            _tfail("vertex must have a string 'id'", f"skeleton.vertices[{i}]")
        verts.append(SkeletonVertex(rv["id"], rv.get("kind"), rv.get("bind")))
    for i, re_ in enumerate(raw_sk.get("edges", [])):
        if not isinstance(re_, dict):
            _tfail("edge must be an object", f"skeleton.edges[{i}]")
        edges.append(SkeletonEdge(re_.get("a"), re_.get("b"), re_.get("type")))
    skeleton = Skeleton(tuple(verts), tuple(edges))
    _check_skeleton(skeleton, ports)

    semantics = tuple(_semantic_from_doc(rs, ports, f"semantic_constraints[{i}]")
                      for i, rs in enumerate(doc.get("semantic_constraints", [])))
    passives = doc.get("passive_set", sorted(DEFAULT_PASSIVES))
    if not isinstance(passives, list) or not all(isinstance(p, str) for p in passives):
        _tfail("passive_set must be a list of part types", "passive_set")
    tol = doc.get("tolerance", {})
    budget = tol.get("budget", DEFAULT_BUDGET) if isinstance(tol, dict) else None
    if not isinstance(budget, int) or budget < 1:
        _tfail("tolerance.budget must be a positive integer", "tolerance")
    return SystemTemplate(doc["name"], ports, tuple(rules), skeleton, semantics,
                          frozenset(passives), Tolerance(budget))


def parse_template(data: bytes | str) -> SystemTemplate:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise TemplateError(f"not UTF-8: {e.reason}", f"byte {e.start}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise TemplateError(f"malformed document: {e.msg}", f"line {e.lineno}") from None
    return template_from_doc(doc)


def template_to_doc(t: SystemTemplate) -> dict[str, Any]:
    def rule_doc(r: PairRule) -> dict:
        d: dict[str, Any] = {"tau": r.tau.value, "a": str(r.a), "b": str(r.b)}
        if r.min_count != 1:
            d["min_count"] = r.min_count
        return d

    def vertex_doc(v: SkeletonVertex) -> dict:
        d: dict[str, Any] = {"id": v.id, "kind": v.kind}
        if v.bind is not None:
            d["bind"] = v.bind
        return d

    def semantic_doc(s: SemanticConstraint) -> dict:
        return {"kind": s.kind, **{k: list(v) if isinstance(v, tuple) else v
                                   for k, v in s.args.items()}}

    return {
        "name": t.name,
        "ports": {k: str(v) for k, v in t.ports.items()},
        "rules": [rule_doc(r) for r in t.rules],
        "skeleton": {
            "vertices": [vertex_doc(v) for v in t.skeleton.vertices],
            "edges": [{"a": e.a, "b": e.b, "type": e.type} for e in t.skeleton.edges],
        },
        "semantic_constraints": [semantic_doc(s) for s in t.semantic_constraints],
        "passive_set": sorted(t.passive_set),
        "tolerance": {"budget": t.tolerance.budget},
    }


def serialize_template(t: SystemTemplate) -> bytes:
    return _jsonfmt.dump_bytes(template_to_doc(t))


# -- skeleton matching -------------------------------------------------------------

@dataclass(frozen=True)
class MatchResult:
    matched: bool
    mapping: Mapping[str, str] = field(default_factory=dict)
    missing: tuple[str, ...] = ()
    unresolved_ports: tuple[str, ...] = ()
    budget_exceeded: bool = False


def _vertex_candidates(v: SkeletonVertex, g: RoleGraph, primitives: Iterable[Primitive],
                       port_nets: Mapping[str, frozenset[str]]) -> list[str]:
    if v.kind == "port":
        pool = port_nets.get(v.bind, frozenset())
    elif v.kind == "switch_node":
        pool = {p.anchor_nets[0] for p in primitives if p.kind is PrimitiveKind.HALF_BRIDGE}
    elif v.kind == "role_class":
        pool = g.nets_with_roles([v.bind])
    else:
        pool = g.net_roles.keys()
    return sorted(pool)


def _describe_vertex(v: SkeletonVertex) -> str:
    return f"{v.kind} vertex {v.id}"


def _describe_edge(e: SkeletonEdge) -> str:
    return f"{e.type} edge {e.a}->{e.b}"


def subgraph_match(skeleton: Skeleton, g: RoleGraph, primitives: Iterable[Primitive],
                   port_nets: Mapping[str, frozenset[str]],
                   budget: int = DEFAULT_BUDGET) -> MatchResult:
    """Embed the skeleton into the role graph by monomorphism.

    On failure ``missing`` names the skeleton elements that cannot be added
    back, greedily, vertices then edges in declaration order.
    """
    primitives = tuple(primitives)
    unresolved = tuple(v.id for v in skeleton.vertices
                       if v.kind == "port" and not port_nets.get(v.bind))
    if unresolved:
        return MatchResult(False, unresolved_ports=unresolved)

    cands = {v.id: _vertex_candidates(v, g, primitives, port_nets) for v in skeleton.vertices}
    host = g.host_edges()

    def attempt(vids: list[str], edges: list[SkeletonEdge]) -> dict | None:
        return find_monomorphism(vids, [(e.a, e.b, e.type) for e in edges], host, cands,
                                 DIRECTED_EDGE_TYPES, budget)

    try:
        full = attempt([v.id for v in skeleton.vertices], list(skeleton.edges))
        if full is not None:
            return MatchResult(True, dict(sorted(full.items())))
        kept_v: list[str] = []
        missing: list[str] = []
        for v in skeleton.vertices:
            if attempt(kept_v + [v.id], []) is not None:
                kept_v.append(v.id)
            else:
                missing.append(_describe_vertex(v))
        kept_e: list[SkeletonEdge] = []
        for e in skeleton.edges:
            if e.a not in kept_v or e.b not in kept_v:
                continue
            if attempt(kept_v, kept_e + [e]) is not None:
                kept_e.append(e)
            else:
                missing.append(_describe_edge(e))
    except BudgetExceeded:
        return MatchResult(False, budget_exceeded=True)
    return MatchResult(False, missing=tuple(missing))


# -- semantic predicates -------------------------------------------------------------

def _reachable(g: RoleGraph, starts: Iterable[str], kinds: frozenset[str]) -> set[str]:
    adj: dict[str, set[str]] = defaultdict(set)
    for e in g.vias + g.device_edges:
        if e.kind in kinds:
            adj[e.a].add(e.b)
            adj[e.b].add(e.a)
    seen = set(starts)
    todo = deque(seen)
    while todo:
        for w in adj[todo.popleft()] - seen:
            seen.add(w)
            todo.append(w)
    return seen


def check_semantic(s: SemanticConstraint, g: RoleGraph, port_nets: Mapping[str, frozenset[str]],
                   primitives: Iterable[Primitive]) -> bool:
    if s.kind == "primitive_count_at_least":
        kind = PrimitiveKind(s.args["primitive"])
        return sum(1 for p in primitives if p.kind is kind) >= s.args["n"]
    a = port_nets.get(s.args["a"], frozenset())
    b = port_nets.get(s.args["b"], frozenset())
    if not a or not b:
        return False
    if s.kind == "port_reaches_port_via":
        return bool(_reachable(g, a, frozenset(s.args["via"])) & b)
    if s.kind == "nets_in_distinct_isolation":
        return not (a & b) and not (_reachable(g, a, DC_KINDS) & b)
    raise ValueError(f"unknown semantic constraint {s.kind!r}")


# -- end to end ----------------------------------------------------------------------

def resolve_ports(t: SystemTemplate, c: Circuit, kg: KnowledgeGraph) -> dict[str, frozenset[str]]:
    return {name: resolve_endpoint(ep, c, kg) for name, ep in t.ports.items()}


def check_phase4(c: Circuit, kg: KnowledgeGraph, t: SystemTemplate, g: RoleGraph,
                 port_nets: Mapping[str, frozenset[str]],
                 budget: int | None = None) -> list[Violation]:
    p4 = Phase.SYSTEM_TOPOLOGY
    out: list[Violation] = []
    primitives = infer_primitives(g, c, kg)
    if t.skeleton.vertices:
        m = subgraph_match(t.skeleton, g, primitives, port_nets, budget or t.tolerance.budget)
        for vid in m.unresolved_ports:
            port = t.skeleton.vertex(vid).bind
            out.append(Violation(p4, "unresolved_port", "skeleton", (str(t.ports[port]),), (),
                                 f"skeleton port {port} ({t.ports[port]}) resolves to no net"))
        if m.budget_exceeded:
            out.append(Violation(p4, "search_budget_exceeded", "skeleton", (), (),
                                 "skeleton search budget exceeded; topology not verified"))
        if m.missing:
            out.append(Violation(p4, "skeleton_mismatch", "skeleton", m.missing, (),
                                 "skeleton mismatch: missing " + "; ".join(m.missing)))
    for i, s in enumerate(t.semantic_constraints):
        if not check_semantic(s, g, port_nets, primitives):
            nets = ()
            if "a" in s.args:
                nets = tuple(sorted(port_nets.get(s.args["a"], frozenset())
                                    | port_nets.get(s.args["b"], frozenset())))
            out.append(Violation(p4, s.kind, f"semantic_constraints[{i}]", (), nets,
                                 f"semantic constraint failed: {s.describe()}"))
    return out


def verify(c: Circuit, kg: KnowledgeGraph, t: SystemTemplate,
           budget: int | None = None) -> tuple[bool, list[Violation]]:
    """Run the four phases in order.

    Phase 1 failures are reported alone; Phase 2 failures stop the run before
    the topology phases. Phases 3 and 4 always run together.
    """
    port_nets = resolve_ports(t, c, kg)
    external = frozenset().union(*port_nets.values()) if port_nets else frozenset()
    erc = check_erc(c, kg, external)
    if erc:
        return False, erc
    violations = check_intra(c, kg)
    if violations:
        return False, violations

    g = build_topology_graph(c, kg, t.passive_set)
    for i, r in enumerate(t.rules):
        v = eval_rule(r, g, resolve_endpoint(r.a, c, kg), resolve_endpoint(r.b, c, kg), i)
        if v is not None:
            violations.append(v)
    violations.extend(check_phase4(c, kg, t, g, port_nets, budget))
    return not violations, violations
