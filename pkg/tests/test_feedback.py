import pytest

from pcbverify.constraints import Phase, make_violation
from pcbverify.data import mutation_corpus
from pcbverify.feedback import (FeedbackLevel, classify_phases, earliest_phase, phase_counts, render,
                                report_doc)
from pcbverify.topology import verify

FULL = ("C_DIRECT missing between secondary_vdd and secondary_gnd (nets ['VISO+'] vs ['ISO_0V'])\n"
        "Please fix these topology issues and provide the corrected code.")
WEAK = "Topology verification failed.\nPlease fix these issues and provide the corrected code."
NONE = "Attempt failed. Please try again."


@pytest.fixture(scope="module")
def cap_removed(bundles, kg):
    b = bundles[7]
    return verify(b.golden.without_component("C2"), kg, b.template)[1]


def test_three_levels(cap_removed):
    assert render(cap_removed, "full").text == FULL
    assert render(cap_removed, FeedbackLevel.WEAK).text == WEAK
    assert render(cap_removed, "none").text == NONE


@pytest.mark.parametrize("level", list(FeedbackLevel))
def test_pass_text(level):
    assert render([], level).text == "PASS"


def test_weak_lists_each_phase_once():
    v = [make_violation(Phase.KG_CONSTRAINT, "must_be_connected", "U1", ("FB",)),
         make_violation(Phase.KG_CONSTRAINT, "must_be_connected", "U1", ("EN",)),
         make_violation(Phase.SYNTAX_ERC, "single_endpoint_net", "R1", ("1",), ("X",))]
    assert render(v, "weak").text == ("Constraint verification failed.\nSyntax/ERC check failed.\n"
                                      "Please fix these issues and provide the corrected code.")


def test_full_one_line_per_violation():
    v = [make_violation(Phase.KG_CONSTRAINT, "must_be_connected", "U1", (p,)) for p in ("EN", "FB")]
    assert render(v, "full").text.splitlines()[:2] == ["U1: pin EN is unconnected", "U1: pin FB is unconnected"]


def test_histogram_on_message(cap_removed):
    msg = render(cap_removed, "none")
    assert msg.phase_histogram[Phase.TOPOLOGY] == 1
    assert sum(msg.phase_histogram.values()) == 1
    assert phase_counts([]) == {p: 0 for p in Phase}


def test_unknown_level():
    with pytest.raises(ValueError):
        render([], "verbose")


def test_earliest_phase_attribution():
    v1 = make_violation(Phase.SYNTAX_ERC, "single_endpoint_net", "R1", ("1",), ("X",))
    v2 = make_violation(Phase.KG_CONSTRAINT, "must_be_connected", "U1", ("FB",))
    assert earliest_phase([v2, v1]) is Phase.SYNTAX_ERC
    assert classify_phases([[v2, v1]])[Phase.SYNTAX_ERC] == 1
    assert earliest_phase([]) is None


def test_all_passing_corpus():
    assert classify_phases([[], [], []]) == {p: 0 for p in Phase}


def test_constraint_mutations_concentrate_in_phase2(bundles, kg):
    kg_codes = {"supply_pair", "must_be_connected", "driving_pair",
                "differential_pair_must_be_distinct", "isolation_bridge"}
    finals = []
    for b in bundles.values():
        for m, c in zip(b.mutations, mutation_corpus(b)):
            if m.code in kg_codes:
                finals.append(verify(c, kg, b.template)[1])
    assert len(finals) >= 5
    hist = classify_phases(finals)
    assert hist[Phase.KG_CONSTRAINT] == len(finals)


def test_report_doc(cap_removed):
    d = report_doc(cap_removed, "full")
    assert d["ok"] is False
    assert d["feedback"] == {"level": "full", "text": FULL}
    assert d["violations"][0]["phase"] == "Phase3_Topology"
