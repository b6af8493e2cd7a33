import json

import pytest

from pcbverify.errors import KGError
from pcbverify.kg import (ConstraintKind, KnowledgeGraph, PinRole, RESERVED_ROLES, entry_from_doc,
                          kg_from_doc, lint_kg, mean_footprint, parse_kg, role_of, serialize_kg,
                          token_footprint)


def test_ontology_size():
    assert len(PinRole) == 32
    assert len(PinRole) + len(RESERVED_ROLES) == 34


def test_mgj2d_roles(kg):
    roles = {p.number: (p.name, p.role) for p in kg.entry("MGJ2D121505SC").pins}
    assert roles == {
        1: ("+VIN", PinRole.PRIMARY_VDD),
        2: ("-VIN", PinRole.PRIMARY_GND),
        5: ("-VOUT", PinRole.SECONDARY_GND),
        6: ("0V", PinRole.SECONDARY_GND),
        7: ("+VOUT", PinRole.SECONDARY_VDD),
    }


def test_opa328_constraints(kg):
    decls = {(c.kind, c.pins) for c in kg.entry("OPA328").constraints}
    assert (ConstraintKind.SUPPLY_PAIR, ("V+", "V-")) in decls
    assert (ConstraintKind.DIFFERENTIAL_PAIR_MUST_BE_DISTINCT, ("+IN", "-IN")) in decls
    assert (ConstraintKind.MUST_BE_CONNECTED, ("+IN", "-IN", "OUT")) in decls
    assert len(decls) == 3


def _doc(**entry):
    base = {"pins": [{"number": 1, "name": "1", "role": "passive_terminal"},
                     {"number": 2, "name": "2", "role": "passive_terminal"}]}
    base.update(entry)
    return {"parts": {"X": base}}


def test_unknown_role_rejected():
    d = _doc(pins=[{"number": 1, "name": "P", "role": "power_in_misc"}])
    with pytest.raises(KGError, match="unknown pin role"):
        parse_kg(json.dumps(d))


def test_reserved_role_rejected():
    d = _doc(pins=[{"number": 1, "name": "P", "role": "role_reserved_1"}])
    with pytest.raises(KGError):
        parse_kg(json.dumps(d))


@pytest.mark.parametrize("constraint, needle", [
    ({"kind": "supply_pair", "pins": ["1"]}, "arity"),
    ({"kind": "driving_pair", "pins": ["1", "2"]}, "arity"),
    ({"kind": "must_be_connected", "pins": []}, "arity"),
    ({"kind": "supply_pair", "pins": ["1", "9"]}, "nonexistent pin"),
    ({"kind": "keep_apart", "pins": ["1", "2"]}, "unknown constraint kind"),
])
def test_bad_constraints_rejected(constraint, needle):
    with pytest.raises(KGError, match=needle):
        kg_from_doc(_doc(constraints=[constraint]))


@pytest.mark.parametrize("groups, needle", [
    ({"a": [1]}, "at least two"),
    ({"a": [1], "b": [1]}, "more than one"),
    ({"a": [1], "b": [3]}, "unknown pin"),
])
def test_bad_isolation_groups_rejected(groups, needle):
    with pytest.raises(KGError, match=needle):
        kg_from_doc(_doc(isolation_groups=groups))


def test_role_of(kg):
    assert role_of(kg, "MGJ2D121505SC", 7) is PinRole.SECONDARY_VDD
    assert role_of(kg, "R", 1) is PinRole.PASSIVE_TERMINAL
    with pytest.raises(KGError):
        role_of(kg, "NOPE", 1)
    with pytest.raises(KGError):
        role_of(kg, "R", 3)


def test_lint_missing_isolation_groups(kg):
    d = json.loads(serialize_kg(kg.subset(["MGJ2D121505SC"])))
    del d["parts"]["MGJ2D121505SC"]["isolation_groups"]
    diags = lint_kg(kg_from_doc(d))
    assert [x.code for x in diags] == ["isolation_groups_missing"]
    assert "isolated part lacks isolation groups" in diags[0].message


def test_lint_other_rules(kg):
    d = json.loads(serialize_kg(kg.subset(["TLV1117-33", "IMW65R015M2H"])))
    d["parts"]["TLV1117-33"]["constraints"] = []
    d["parts"]["IMW65R015M2H"]["constraints"] = []
    codes = sorted(x.code for x in lint_kg(kg_from_doc(d)))
    assert codes == ["gate_undriven", "supply_pin_unpaired", "supply_pin_unpaired"]


def test_shipped_kg_is_clean(kg):
    assert lint_kg(kg) == []


def test_empty_kg_is_clean():
    assert lint_kg(KnowledgeGraph()) == []


def test_footprint_hand_count():
    entry = entry_from_doc("R", {"pins": [{"number": 1, "name": "1", "role": "passive_terminal"},
                                          {"number": 2, "name": "2", "role": "passive_terminal"}]})
    # R pins number 1 name 1 role passive_terminal number 2 name 2 role passive_terminal
    # constraints attributes
    assert token_footprint(entry) == 1 + 1 + 12 + 2


def test_shipped_footprint_band(kg):
    mean = mean_footprint(kg)
    assert 100 <= mean <= 600


def test_serialization_round_trip(kg):
    data = serialize_kg(kg)
    assert serialize_kg(parse_kg(data)) == data
    assert parse_kg(data) == kg


def test_subset_and_contains(kg):
    sub = kg.subset(["R", "C"])
    assert "R" in sub and "D" not in sub
    with pytest.raises(KGError, match="unknown part type"):
        sub.entry("D")


def test_group_of(kg):
    e = kg.entry("MGJ2D121505SC")
    assert e.group_of(1) == "primary" and e.group_of(7) == "secondary"
    assert kg.entry("R").group_of(1) is None
