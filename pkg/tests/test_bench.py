import json
from dataclasses import dataclass

import pytest

from pcbverify.bench import read_trials, render_table, report_from_trials, run_benchmark, write_outputs
from pcbverify.circuit import circuit_to_doc
from pcbverify.data import load_task_specs, mutation_corpus
from pcbverify.harness import GeneratorReply
from pcbverify.stats import pass_at_k, wilson_interval
from pcbverify.stub import succeeding_trials


@dataclass
class InProcess:
    """Golden or first-mutation replies chosen like the flaky stub."""

    bundles: dict
    successes: dict  # task id -> count out of 15; missing means always golden

    def generate(self, request):
        b = self.bundles[request["task_id"]]
        k = self.successes.get(b.spec.id)
        if k is None or request["trial"] in succeeding_trials(k, 15, request["seed"], b.spec.id):
            doc = circuit_to_doc(b.golden)
        else:
            doc = circuit_to_doc(mutation_corpus(b)[0])
        return GeneratorReply(doc, 5, 7)


@dataclass
class Invalid:
    def generate(self, request):
        return GeneratorReply({"components": [{"ref": "?"}]}, 1, 1)


@pytest.fixture(scope="module")
def easy_specs():
    return load_task_specs([1, 2, 3, 7, 17])


def test_always_golden(bundles, easy_specs):
    report, trials = run_benchmark(easy_specs, InProcess(bundles, {}), n=15, ks=(1, 5), jobs=4)
    assert [t.pass_at_k for t in report.tasks] == [{1: 100.0, 5: 100.0}] * 5
    assert report.solved == 5 and report.overall_pass_at_1 == 100.0
    assert len(trials) == 75 and all(len(t.attempts) == 1 for t in trials)


def test_seeded_flaky_task(bundles, easy_specs):
    gen = InProcess(bundles, {3: 8, 17: 1})
    report, _ = run_benchmark(easy_specs, gen, n=15, ks=(1, 5), jobs=4)
    rows = {t.task_id: t for t in report.tasks}
    assert (rows[3].c, rows[3].pass_at_k[1]) == (8, 53.3)
    assert rows[17].pass_at_k == {1: pass_at_k(15, 1, 1), 5: 33.3}
    assert rows[3].wilson == wilson_interval(8 / 15, 15, 1.645)
    # mean of c/n over tasks: (1 + 1 + 8/15 + 1 + 1/15) / 5
    assert report.overall_pass_at_1 == 72.0


def test_always_failing(easy_specs):
    report, trials = run_benchmark(easy_specs, Invalid(), n=3, ks=(1,), max_retries=2)
    assert report.overall_pass_at_1 == 0.0 and report.solved == 0
    total = sum(sum(h.values()) for h in report.phase_histograms.values())
    assert total == 15
    for hist in report.phase_histograms.values():
        assert set(k for k, v in hist.items() if v) <= {"Phase1_SyntaxERC"}
    assert all(len(t.attempts) == 2 for t in trials)


def test_phase_histogram_by_difficulty(bundles, easy_specs):
    # task 3's first mutation fails in Phase 2, task 17's in Phase 4
    report, _ = run_benchmark(easy_specs, InProcess(bundles, {3: 0, 17: 0}), n=2, ks=(1,), max_retries=1)
    assert report.phase_histograms["Easy"]["Phase2_KGConstraint"] == 2
    assert report.phase_histograms["Hard"]["Phase4_SystemTopology"] == 2
    assert sum(report.phase_histograms["Medium"].values()) == 0


def test_round_curve(bundles, easy_specs):
    report, trials = run_benchmark(easy_specs[:1], InProcess(bundles, {1: 0}), n=4, ks=(1,), max_retries=3)
    assert [p.round for p in report.round_curve] == [1, 2, 3]
    assert [p.cumulative_successes for p in report.round_curve] == [0, 0, 0]
    assert [p.cumulative_tokens for p in report.round_curve] == [48, 96, 144]


def test_bad_k(easy_specs):
    with pytest.raises(ValueError):
        run_benchmark(easy_specs, Invalid(), n=3, ks=(5,))
    with pytest.raises(ValueError):
        run_benchmark(easy_specs, Invalid(), n=3, ks=(0,))


def test_table_and_outputs(tmp_path, bundles, easy_specs):
    report, trials = run_benchmark(easy_specs, InProcess(bundles, {3: 8}), n=15, ks=(1, 5), jobs=2)
    table = render_table(report)
    lines = table.splitlines()
    assert lines[0].split()[:5] == ["Task", "ID", "Level", "Pass@1", "Pass@5"]
    row3 = next(l for l in lines if l.split()[:1] == ["3"])
    assert row3.split()[1:5] == ["Easy", "53.3", "99.3", "8/15"]
    assert lines[-2] == "# Solved: 5/5"
    assert lines[-1] == "Overall Pass@1 (%): 90.7"
    paths = write_outputs(tmp_path / "out", report, trials)
    doc = json.loads(paths["report"].read_text())
    assert doc["tasks"][2]["pass_at_k"] == {"1": 53.3, "5": 99.3}
    back = read_trials(paths["trials"])
    assert sorted(back, key=lambda t: (t.task_id, t.trial)) == sorted(trials, key=lambda t: (t.task_id, t.trial))
    rebuilt = report_from_trials(easy_specs, back, (1, 5))
    assert rebuilt == report


def test_deterministic_across_job_counts(bundles, easy_specs):
    gen = InProcess(bundles, {1: 4, 7: 11})
    a, _ = run_benchmark(easy_specs, gen, n=15, ks=(1, 5), jobs=1)
    b, _ = run_benchmark(easy_specs, gen, n=15, ks=(1, 5), jobs=8)
    assert a == b


def test_seed_changes_sample(bundles):
    assert succeeding_trials(8, 15, 0, 3) != succeeding_trials(8, 15, 1, 3)
    assert len(succeeding_trials(8, 15, 0, 3)) == 8
