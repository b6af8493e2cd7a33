import json

import pytest

from pcbverify.circuit import Circuit, make_component
from pcbverify.constraints import Phase
from pcbverify.data import apply_edits
from pcbverify.errors import TemplateError
from pcbverify.kg import PinRole
from pcbverify.topology import (PairRule, Primitive, PrimitiveKind, RoleGraph, RuleType, Skeleton,
                                SkeletonEdge, SkeletonVertex, ViaEdge, build_topology_graph,
                                check_semantic, eval_rule, infer_primitives, parse_endpoint,
                                parse_template, resolve_endpoint, resolve_ports, serialize_template,
                                subgraph_match, template_from_doc, verify)

from conftest import two_pin


def test_single_cap_graph(kg):
    g = build_topology_graph(two_pin("C1", "C", "A", "B"), kg)
    assert g.nets == ("A", "B")
    assert g.vias == (ViaEdge("A", "B", "capacitor", "C1"),)
    assert g.self_loops == ()


def test_self_loop_flag(kg):
    g = build_topology_graph(two_pin("R1", "R", "A", "A"), kg)
    assert g.self_loops == ("R1",) and g.vias == ()


def test_task7_has_output_cap_via(kg, bundles):
    g = build_topology_graph(bundles[7].golden, kg)
    assert g.via_count("capacitor", "VISO+", "ISO_0V") == 1
    assert g.via_count("capacitor", "ISO_0V", "VISO+") == 1


def test_passive_set_gates_via_edges(kg):
    c = two_pin("L1", "Inductor_power", "A", "B")
    assert build_topology_graph(c, kg).vias == ()
    g = build_topology_graph(c, kg, {"Inductor_power"})
    assert [e.kind for e in g.vias] == ["inductor"]


def test_diode_via_oriented(kg, bundles):
    g = build_topology_graph(bundles[14].golden, kg)
    assert g.via_count("diode", "VDD", "HB") == 1
    assert g.via_count("diode", "HB", "VDD") == 0


def test_switch_and_direct_edges(kg, bundles):
    g = build_topology_graph(bundles[8].golden, kg)
    sw = sorted((e.a, e.b) for e in g.device_edges if e.kind == "switch")
    assert sw == [("VBUS+", "VSW"), ("VSW", "PGND")]
    direct = {(e.a, e.b) for e in g.device_edges if e.kind == "direct" and e.ref == "Q1"}
    assert direct == {("GATE_H", "VBUS+"), ("GATE_H", "VSW"), ("VBUS+", "VSW")}


def test_resolve_endpoints(kg, bundles):
    c = bundles[7].golden
    assert resolve_endpoint("role:secondary_vdd", c, kg) == {"VISO+"}
    assert resolve_endpoint("U1.+VOUT", c, kg) == {"VISO+"}
    assert resolve_endpoint("U1.7", c, kg) == {"VISO+"}
    assert resolve_endpoint("role:mosfet_gate", c, kg) == frozenset()
    assert resolve_endpoint("net:VIN", c, kg) == {"VIN"}
    assert resolve_endpoint("net:NOPE", c, kg) == frozenset()
    assert resolve_endpoint("U1.-VOUT", c, kg) == frozenset()  # floating
    assert resolve_endpoint("U9.1", c, kg) == frozenset()


@pytest.mark.parametrize("text", ["", "role:not_a_role", "net:", "u1.VIN", "U1", "U1."])
def test_malformed_endpoints(text):
    with pytest.raises(ValueError):
        parse_endpoint(text)


def _rule(kg, c, tau, a, b, n=1):
    r = PairRule(RuleType(tau), parse_endpoint(a), parse_endpoint(b), n)
    g = build_topology_graph(c, kg)
    return eval_rule(r, g, resolve_endpoint(r.a, c, kg), resolve_endpoint(r.b, c, kg))


def test_c_direct_missing_message(kg, bundles):
    c = bundles[7].golden.without_component("C2")
    v = _rule(kg, c, "C_DIRECT", "role:secondary_vdd", "role:secondary_gnd")
    assert v.phase is Phase.TOPOLOGY and v.code == "C_DIRECT"
    assert v.message == ("C_DIRECT missing between secondary_vdd and secondary_gnd "
                         "(nets ['VISO+'] vs ['ISO_0V'])")
    assert _rule(kg, bundles[7].golden, "C_DIRECT", "role:secondary_vdd", "role:secondary_gnd") is None


def test_parallel_caps_tolerated(kg, bundles):
    c = bundles[7].golden.with_component(make_component("C3", "C", [(1, "1"), (2, "2")]),
                                         {1: "VISO+", 2: "ISO_0V"})
    assert _rule(kg, c, "C_DIRECT", "role:secondary_vdd", "role:secondary_gnd") is None
    assert _rule(kg, c, "C_DIRECT", "role:secondary_vdd", "role:secondary_gnd", 2) is None
    v = _rule(kg, c, "C_DIRECT", "role:secondary_vdd", "role:secondary_gnd", 3)
    assert v.message.endswith("; found 2 of 3")


def test_other_rule_kinds(kg, bundles):
    c = bundles[16].golden
    assert _rule(kg, c, "CONNECTED", "U2.CLMPI", "net:OUT") is None
    assert _rule(kg, c, "DISTINCT", "net:VCC", "net:GND") is None
    v = _rule(kg, c, "DISTINCT", "U2.RST/EN", "U2.VCC")
    assert v.code == "DISTINCT" and v.nets == ("VCC",)
    v = _rule(kg, c, "CONNECTED", "U2.OUTH", "net:OUT")
    assert v.code == "CONNECTED"
    assert _rule(kg, c, "R_SERIES", "U2.FLT", "U2.VCC") is None
    assert _rule(kg, bundles[6].golden, "L_SERIES", "U1.SW", "net:VOUT") is None
    assert _rule(kg, bundles[14].golden, "DIODE_FORWARD", "U1.VDD", "U1.HB") is None
    assert _rule(kg, bundles[14].golden, "DIODE_FORWARD", "U1.HB", "U1.VDD").code == "DIODE_FORWARD"


def test_unresolved_rule_endpoint(kg, bundles):
    v = _rule(kg, bundles[7].golden, "C_DIRECT", "role:mosfet_gate", "net:GND")
    assert v.code == "unresolved_endpoint"
    assert v.message == "C_DIRECT endpoint role:mosfet_gate resolves to no net"


def test_pair_rule_validation():
    ep = parse_endpoint("net:A")
    with pytest.raises(ValueError):
        PairRule(RuleType.C_DIRECT, ep, ep, 0)
    with pytest.raises(ValueError):
        PairRule(RuleType.DISTINCT, ep, ep)


def test_half_bridge_primitive(kg, bundles):
    c = bundles[8].golden
    prims = infer_primitives(build_topology_graph(c, kg), c, kg)
    hbs = [p for p in prims if p.kind is PrimitiveKind.HALF_BRIDGE]
    assert len(hbs) == 1 and hbs[0].anchor_nets == ("VSW", "VBUS+", "PGND")


def test_buck_primitives(kg, bundles):
    b = bundles[17]
    g = build_topology_graph(b.golden, kg, b.template.passive_set)
    kinds = {p.kind for p in infer_primitives(g, b.golden, kg)}
    assert {PrimitiveKind.HALF_BRIDGE, PrimitiveKind.LC_FILTER, PrimitiveKind.DECOUPLING_CAP} <= kinds


def test_other_primitives(kg, bundles):
    def kinds(i):
        b = bundles[i]
        g = build_topology_graph(b.golden, kg, b.template.passive_set)
        return [p.kind for p in infer_primitives(g, b.golden, kg)]
    assert PrimitiveKind.BOOTSTRAP_CELL in kinds(14)
    assert PrimitiveKind.BOOTSTRAP_CELL in kinds(6)
    assert kinds(20).count(PrimitiveKind.XFMR_LINK) == 1
    assert kinds(22).count(PrimitiveKind.HALF_BRIDGE) == 3
    assert kinds(17).count(PrimitiveKind.GATE_DRIVE_CELL) == 2
    assert PrimitiveKind.GATE_DRIVE_CELL not in kinds(15)  # no MOSFET to drive


def test_no_mosfets_no_half_bridge(kg, bundles):
    c = bundles[5].golden
    assert not any(p.kind is PrimitiveKind.HALF_BRIDGE
                   for p in infer_primitives(build_topology_graph(c, kg), c, kg))


def _graph(edges, roles=None):
    nets = sorted({x for a, b, _ in edges for x in (a, b)})
    vias = tuple(ViaEdge(a, b, t, f"X{i}") for i, (a, b, t) in enumerate(edges))
    return RoleGraph({n: tuple((roles or {}).get(n, ())) for n in nets}, vias, (), ())


def _skeleton(vertices, edges):
    return Skeleton(tuple(SkeletonVertex(*v) for v in vertices), tuple(SkeletonEdge(*e) for e in edges))


def test_triangle_skeleton_into_clique():
    g = _graph([(a, b, "capacitor") for i, a in enumerate("wxyz") for b in "wxyz"[i + 1:]])
    sk = _skeleton([("a", "any"), ("b", "any"), ("c", "any")],
                   [("a", "b", "capacitor"), ("b", "c", "capacitor"), ("a", "c", "capacitor")])
    assert subgraph_match(sk, g, (), {}).matched


def test_vertex_kinds_restrict_candidates():
    g = _graph([("x", "y", "capacitor"), ("y", "z", "capacitor")], {"z": ("out",)})
    sk = _skeleton([("p", "port", "P"), ("r", "role_class", "out")], [("p", "r", "capacitor")])
    assert subgraph_match(sk, g, (), {"P": frozenset({"y"})}).mapping == {"p": "y", "r": "z"}
    assert not subgraph_match(sk, g, (), {"P": frozenset({"x"})}).matched
    hb = Primitive(PrimitiveKind.HALF_BRIDGE, ("Q1", "Q2"), ("x", "y", "z"))
    sk2 = _skeleton([("s", "switch_node")], [])
    assert subgraph_match(sk2, g, (hb,), {}).mapping == {"s": "x"}
    assert not subgraph_match(sk2, g, (), {}).matched


def test_unresolved_port_is_not_a_search_failure():
    sk = _skeleton([("p", "port", "P")], [])
    m = subgraph_match(sk, _graph([("x", "y", "direct")]), (), {"P": frozenset()})
    assert m.unresolved_ports == ("p",) and m.missing == ()


def test_budget_exhaustion_reported(kg, bundles):
    b = bundles[20]
    ok, v = verify(b.golden, kg, b.template, budget=3)
    assert not ok and [x.code for x in v] == ["search_budget_exceeded"]


def test_miswired_buck_missing_inductor_edge(kg, bundles):
    b = bundles[17]
    bad = apply_edits(b.golden, b.mutations[0].edits)
    ok, v = verify(bad, kg, b.template)
    assert not ok
    assert [(x.phase, x.code) for x in v] == [(Phase.SYSTEM_TOPOLOGY, "skeleton_mismatch")]
    assert v[0].pins == ("inductor edge VSW->VOUT",)
    assert v[0].message == "skeleton mismatch: missing inductor edge VSW->VOUT"


def test_verify_golden_and_fast_fail(kg, bundles):
    b = bundles[7]
    assert verify(b.golden, kg, b.template) == (True, [])
    shorted = b.golden.with_pin_moved("U1", 2, "VIN")
    ok, v = verify(shorted, kg, b.template)
    assert not ok and [(x.phase, x.code) for x in v] == [(Phase.KG_CONSTRAINT, "supply_pair")]


def test_phase1_reported_alone(kg, bundles):
    b = bundles[7]
    c = b.golden.with_pin_moved("C2", 2, "NC1").with_pin_moved("U1", 2, "VIN")
    ok, v = verify(c, kg, b.template)
    assert {x.phase for x in v} == {Phase.SYNTAX_ERC}


def test_phases_3_and_4_reported_together(kg, bundles):
    b = bundles[17]
    c = b.golden.with_pin_moved("L1", 1, "VIN").without_component("C11")
    ok, v = verify(c, kg, b.template)
    assert {x.phase for x in v} == {Phase.TOPOLOGY, Phase.SYSTEM_TOPOLOGY}


def test_port_nets_exempt_from_dangling_check(kg, bundles):
    b = bundles[3]
    assert "VOUT" in resolve_ports(b.template, b.golden, kg)["VOUT"]
    assert verify(b.golden, kg, b.template)[0]


def test_semantic_predicates(kg, bundles):
    b = bundles[7]
    g = build_topology_graph(b.golden, kg)
    ports = resolve_ports(b.template, b.golden, kg)
    (iso,) = b.template.semantic_constraints
    assert check_semantic(iso, g, ports, ())
    bridged = b.golden.with_component(make_component("R9", "R", [(1, "1"), (2, "2")]), {1: "VIN", 2: "VISO+"})
    gb = build_topology_graph(bridged, kg)
    assert not check_semantic(iso, gb, resolve_ports(b.template, bridged, kg), ())
    ok, v = verify(bridged, kg, b.template)
    assert [x.code for x in v] == ["nets_in_distinct_isolation"]
    assert v[0].message == "semantic constraint failed: nets_in_distinct_isolation(VIN, VISO)"


def test_primitive_count_semantic(kg, bundles):
    b = bundles[6]
    # bootstrap cap returned to VOUT instead of SW
    ok, v = verify(b.golden.with_pin_moved("C2", 2, "VOUT"), kg, b.template)
    assert [x.code for x in v] == ["C_DIRECT", "primitive_count_at_least"]
    assert v[1].message == "semantic constraint failed: primitive_count_at_least(bootstrap_cell, 1)"


def _tdoc(**over):
    d = {"name": "t", "ports": {"A": "net:A", "B": "net:B"},
         "rules": [{"tau": "C_DIRECT", "a": "net:A", "b": "net:B"}],
         "skeleton": {"vertices": [{"id": "a", "kind": "port", "bind": "A"},
                                   {"id": "b", "kind": "port", "bind": "B"}],
                      "edges": [{"a": "a", "b": "b", "type": "capacitor"}]},
         "semantic_constraints": []}
    d.update(over)
    return d


def test_template_round_trip():
    t = template_from_doc(_tdoc())
    data = serialize_template(t)
    assert serialize_template(parse_template(data)) == data
    assert parse_template(data) == t


def test_shipped_templates_round_trip(corpus_root):
    for f in sorted(corpus_root.glob("tasks/*/template.json")):
        raw = f.read_bytes()
        assert serialize_template(parse_template(raw)) == raw, f


@pytest.mark.parametrize("over, needle", [
    ({"rules": [{"tau": "NOPE", "a": "net:A", "b": "net:B"}]}, "unknown rule type"),
    ({"rules": [{"tau": "C_DIRECT", "a": "role:bogus", "b": "net:B"}]}, "unknown pin role"),
    ({"skeleton": {"vertices": [{"id": "a", "kind": "port", "bind": "Z"}], "edges": []}}, "unknown port"),
    ({"skeleton": {"vertices": [{"id": "a", "kind": "any"}, {"id": "b", "kind": "any"}], "edges": []}},
     "not connected"),
    ({"skeleton": {"vertices": [{"id": "a", "kind": "any"}, {"id": "b", "kind": "any"}],
                   "edges": [{"a": "a", "b": "b", "type": "wire"}]}}, "unknown edge type"),
    ({"semantic_constraints": [{"kind": "nets_in_distinct_isolation", "a": "A", "b": "Q"}]}, "unknown port 'Q'"),
])
def test_template_errors(over, needle):
    with pytest.raises(TemplateError, match=needle):
        template_from_doc(_tdoc(**over))


def test_template_syntax_error_has_line():
    with pytest.raises(TemplateError) as exc:
        parse_template("{\n\n,")
    assert exc.value.locus == "line 3"
