import json
import math

import numpy as np
import pytest

import bitprobe.schemes as schemes_mod
from bitprobe.errors import BudgetExceeded, InvalidParameter
from bitprobe.graphs import complete_bipartite
from bitprobe.harness import (
    ALL_SETS,
    BUDGET_ENV,
    DEFAULT_BUDGET,
    Sampled,
    enumeration_budget,
    load_fixture,
    run_fixtures,
    scaling_experiment,
    theta_graph,
    tightness_paths,
    verify_exhaustive,
)
from bitprobe.memory import NON_ADAPTIVE, ProbeTranscript, audit_transcript
from bitprobe.orientation import brute_force_safe_orient
from bitprobe.schemes import build, replay

K44 = complete_bipartite(4)


def test_verify_qn22_all_sets():
    r = verify_exhaustive("qn22", 64, 2, ALL_SETS)
    assert r.passed
    assert r.sets_tested == 1 + 64 + math.comb(64, 2)
    assert r.queries_tested == 64 * r.sets_tested
    assert r.max_probes_seen == 2 and r.space_bits == 32
    assert r.adaptivity_verdict == "non-adaptive PASS"


def test_verify_ca_sampled_on_k44():
    r = verify_exhaustive("ca", 96, 3, Sampled(300, 4), graph=K44, K=6)
    assert r.passed and r.sets_tested == 300 and r.mode == "sampled(300)" and r.seed == 4
    assert r.adaptivity_verdict == "adaptive PASS"
    assert r.graph_summary == "N=8 M=16 girth=4"


def test_verify_cv_report_json():
    r = verify_exhaustive("cv", 16, 2, ALL_SETS)
    d = json.loads(r.to_json())
    assert d["false_positives"] == 0 and d["sets_tested"] == 137


def test_verify_catches_a_broken_scheme(monkeypatch):
    good = schemes_mod._SWEEP_FN["cv"]

    def flip_zero(inst):
        out = good(inst).copy()
        out[0] = ~out[0]
        return out

    monkeypatch.setitem(schemes_mod._SWEEP_FN, "cv", flip_zero)
    r = verify_exhaustive("cv", 8, 1, ALL_SETS)
    assert not r.passed
    assert r.false_positives > 0 and r.false_negatives > 0
    assert r.sweep_mismatches > 0


def test_budget_refusal_and_auto_sample():
    with pytest.raises(BudgetExceeded):
        verify_exhaustive("cv", 64, 3, ALL_SETS, budget=1000)
    r = verify_exhaustive("cv", 64, 3, ALL_SETS, budget=1000, auto_sample=True, sample_count=50, seed=2)
    assert r.passed and r.sets_tested == 50 and r.mode == "sampled(50)"


def test_budget_env_override(monkeypatch):
    monkeypatch.delenv(BUDGET_ENV, raising=False)
    assert enumeration_budget() == DEFAULT_BUDGET
    monkeypatch.setenv(BUDGET_ENV, "1e3")
    assert enumeration_budget() == 1000
    with pytest.raises(BudgetExceeded):
        verify_exhaustive("cv", 64, 3, ALL_SETS)


def test_verify_rejects_bad_arguments():
    with pytest.raises(InvalidParameter):
        verify_exhaustive("qn22", 64, 3)
    with pytest.raises(InvalidParameter):
        verify_exhaustive("zz", 64, 2)
    with pytest.raises(InvalidParameter):
        verify_exhaustive("cv", 8, 1, mode="some")


def test_non_adaptive_audit_flags_adaptive_scheme():
    inst = build("ca", 96, [7, 40], n=3, graph=K44, K=6)
    t = ProbeTranscript(NON_ADAPTIVE)
    inst.query(7, t)
    v = audit_transcript(t, 2, NON_ADAPTIVE, lambda r: replay(inst, 7, r))
    assert not v.passed and v.adaptive_detected


@pytest.mark.parametrize("sid,target", [("qn22", 0.5), ("qn23", 1 / 3), ("cv", 1.0)])
def test_scaling_slopes(sid, target):
    res = scaling_experiment(sid)
    assert abs(res.slope - target) < 0.03
    assert res.decades >= 3 and len(res.rows) >= 6
    assert res.summary()["space_exact"]


def test_scaling_csv_and_errors():
    res = scaling_experiment("cv", [10, 100, 1000])
    lines = res.to_csv().splitlines()
    assert lines[0] == "scheme_id,m,n,space_bits,formula_bits"
    assert lines[2] == "cv,100,2,100,100"
    assert res.slope == pytest.approx(1.0) and res.residual < 1e-9
    with pytest.raises(InvalidParameter):
        scaling_experiment("cv", [10])


def test_theta_graph_layout():
    h = theta_graph(["GR", "RG"])
    assert h.graph.N == 4 and set(h.graph.edges) == {(0, 2), (1, 2), (0, 3), (1, 3)}
    assert {h.graph.edges[e] for e in h.green_edges} == {(0, 2), (1, 3)}
    with pytest.raises(InvalidParameter):
        theta_graph(["GX"])


@pytest.mark.parametrize("length", range(2, 7))
def test_tightness_family(length):
    h = theta_graph(tightness_paths(length))
    g = 2 * length
    assert h.graph.girth == g and h.n_green == (3 * g) // 4 + 1
    assert brute_force_safe_orient(h) is None


def test_fixtures_load():
    for name in ("bfs_marks", "bfs_cycle", "theta_g10", "theta_g8"):
        h = load_fixture(name)
        assert h.graph.M > 0 and 0 < h.n_green


def test_run_fixtures_all_pass():
    r = run_fixtures(30, seed=1)
    assert r.passed, r.to_dict()
    assert len(r.checks) == 10
