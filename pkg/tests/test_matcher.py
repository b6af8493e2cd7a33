import random

import pytest
from hypothesis import given, settings, strategies as st

from pcbverify.matcher import BudgetExceeded, find_monomorphism

from oracles import DIRECTED, brute_force_embeds, random_instance


def match(pv, pe, he, cands=None, **kw):
    hv = sorted({x for u, v, _ in he for x in (u, v)})
    cands = cands or {p: hv for p in pv}
    return find_monomorphism(pv, pe, he, cands, DIRECTED, **kw)


def test_triangle_into_four_clique():
    clique = [(a, b, "direct") for i, a in enumerate("wxyz") for b in "wxyz"[i + 1:]]
    m = match(["a", "b", "c"], [("a", "b", "direct"), ("b", "c", "direct"), ("a", "c", "direct")], clique)
    assert m is not None and len(set(m.values())) == 3


def test_triangle_not_in_path():
    path = [("w", "x", "direct"), ("x", "y", "direct"), ("y", "z", "direct")]
    assert match(["a", "b", "c"], [("a", "b", "direct"), ("b", "c", "direct"), ("a", "c", "direct")],
                 path) is None


def test_direction_respected_for_directed_types():
    host = [("x", "y", "switch")]
    assert match(["a", "b"], [("a", "b", "switch")], host, {"a": ["x", "y"], "b": ["y"]}) == {"a": "x", "b": "y"}
    assert match(["a", "b"], [("a", "b", "switch")], host, {"a": ["y"], "b": ["x"]}) is None
    # undirected types ignore orientation
    assert match(["a", "b"], [("a", "b", "capacitor")], [("x", "y", "capacitor")],
                 {"a": ["y"], "b": ["x"]}) is not None


def test_parallel_edges_need_multiplicity():
    pat = [("a", "b", "capacitor")] * 2
    assert match(["a", "b"], pat, [("x", "y", "capacitor")]) is None
    assert match(["a", "b"], pat, [("x", "y", "capacitor"), ("y", "x", "capacitor")]) is not None


def test_edge_type_must_agree():
    assert match(["a", "b"], [("a", "b", "inductor")], [("x", "y", "capacitor")]) is None


def test_injective():
    # two pattern vertices cannot share the single candidate
    assert find_monomorphism(["a", "b"], [], [], {"a": ["x"], "b": ["x"]}) is None


def test_empty_candidates_fail_fast():
    assert find_monomorphism(["a"], [], [("x", "y", "direct")], {"a": []}) is None


def test_unknown_pattern_vertex():
    with pytest.raises(ValueError):
        find_monomorphism(["a"], [("a", "b", "direct")], [], {"a": ["x"]})


def test_budget_exceeded():
    # no 5-clique in a 7-vertex path forces exhaustive search
    hv = [f"h{i}" for i in range(9)]
    host = [(hv[i], hv[i + 1], "direct") for i in range(8)]
    pv = list("abcde")
    pat = [(a, b, "direct") for i, a in enumerate(pv) for b in pv[i + 1:]]
    with pytest.raises(BudgetExceeded) as exc:
        find_monomorphism(pv, pat, host, {p: hv for p in pv}, budget=20)
    assert exc.value.expansions == 21


def test_returned_mapping_is_valid():
    rng = random.Random(7)
    for _ in range(200):
        pv, pe, hv, he, cands = random_instance(rng)
        m = find_monomorphism(pv, pe, he, cands, DIRECTED)
        if m is None:
            continue
        assert len(set(m.values())) == len(pv)
        assert all(m[p] in cands[p] for p in pv)
        assert brute_force_embeds(pv, pe, he, {p: [m[p]] for p in pv})


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_agrees_with_brute_force(seed):
    pv, pe, hv, he, cands = random_instance(random.Random(seed), max_pattern=4, max_host=7)
    got = find_monomorphism(pv, pe, he, cands, DIRECTED) is not None
    assert got == brute_force_embeds(pv, pe, he, cands)


def test_deterministic():
    rng = random.Random(11)
    pv, pe, hv, he, cands = random_instance(rng)
    assert find_monomorphism(pv, pe, he, cands, DIRECTED) == find_monomorphism(pv, pe, he, cands, DIRECTED)
