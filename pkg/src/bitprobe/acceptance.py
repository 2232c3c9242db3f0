"""
Acceptance suite: twelve numbered end-to-end checks with machine-readable results.

Each ``criterion_N`` returns a :class:`CriterionResult`; :func:`run_criteria`
runs a selection and the CLI prints one JSON object per criterion.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator

from .forests import two_forest_partition
from .errors import NotTwoForests
from .graphs import (
    EXACT,
    Graph,
    check_local_sparsity,
    check_nash_williams_condition,
    complete_bipartite,
    projective_plane_incidence,
    random_locally_sparse,
    wenger_graph,
)
from .harness import ALL_SETS, Sampled, run_fixtures, scaling_experiment, verify_exhaustive
from .memory import CLASSICAL_READ, QUANTUM_XOR, ProbeTranscript
from .orientation import ColoredGraph, brute_force_safe_orient, is_safe, safe_orient
from .schemes import build, g_min, query

__all__ = ["CriterionResult", "CRITERIA", "run_criteria", "colored_graph_stream"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def line(self) -> str:
        return f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'}  {self.title}"

    def to_json(self) -> str:
        return json.dumps(asdict(self), default=str)


def _kinds(inst, x) -> list[str]:
    t = ProbeTranscript(inst.probe_class)
    query(inst, x, t)
    return t.kinds


def _report_fields(r) -> dict:
    keep = ("sets_tested", "queries_tested", "false_positives", "false_negatives",
            "max_probes_seen", "audits", "adaptivity_verdict", "space_bits", "elapsed",
            "graph_summary", "mode")
    return {k: getattr(r, k) for k in keep}


def criterion_1(seed: int = 0) -> CriterionResult:
    g = complete_bipartite(4)
    r = verify_exhaustive("ca", 96, 3, ALL_SETS, graph=g, K=6, seed=seed)
    kinds = _kinds(build("ca", 96, [5], n=3, graph=g, K=6), 5)
    ok = (r.passed and r.sets_tested == sum(math.comb(96, k) for k in range(4))
          and r.max_probes_seen == 2 and r.space_bits == 64
          and kinds == [CLASSICAL_READ, CLASSICAL_READ] and r.elapsed < 120)
    return CriterionResult(1, "classical adaptive on K_{4,4}, m=96, all |S|<=3", ok, _report_fields(r))


def _classical_sampled(number, title, g: Graph, n, K, count, seed, min_girth):
    m = g.M * K
    r = verify_exhaustive("ca", m, n, Sampled(count, seed), graph=g, K=K, seed=seed)
    ok = r.passed and g.girth >= min_girth and r.space_bits == g.M + g.N * K
    out = _report_fields(r)
    out["m"] = m
    return CriterionResult(number, title, ok, out)


def criterion_2(seed: int = 0) -> CriterionResult:
    g = projective_plane_incidence(3)
    res = _classical_sampled(2, "classical adaptive at girth 6 (projective plane q=3)",
                             g, 4, 4, 10**4, seed, 6)
    res.passed = res.passed and g.N == 26 and g.M == 52
    return res


def criterion_3(seed: int = 0) -> CriterionResult:
    return _classical_sampled(3, "classical adaptive at girth 8 (Wenger k=3 p=3)",
                              wenger_graph(3, 3), 6, 4, 10**4, seed, 8)


def colored_graph_stream(count: int, seed: int = 0, max_edges: int = 12) -> Iterator[ColoredGraph]:
    """Random coloured graphs with at most ``max_edges`` edges, finite even
    girth and at most ``floor(3g/4)`` GREEN edges."""
    rng = random.Random(seed)
    made = 0
    while made < count:
        N = rng.randint(4, 10)
        pairs = list(combinations(range(N), 2))
        M = rng.randint(4, min(max_edges, len(pairs)))
        g = Graph.from_edges(N, rng.sample(pairs, M))
        gi = g.girth
        if gi == math.inf or gi % 2:
            continue
        cap = min(M, (3 * gi) // 4)
        green = rng.sample(range(M), rng.randint(0, cap))
        made += 1
        yield ColoredGraph(g, frozenset(green))


def criterion_4(seed: int = 0, count: int = 10**4) -> CriterionResult:
    ok_alg = ok_brute = constructive = 0
    girths: dict = {}
    for h in colored_graph_stream(count, seed):
        girths[h.graph.girth] = girths.get(h.graph.girth, 0) + 1
        o = safe_orient(h)
        ok_alg += is_safe(h, o)
        constructive += o.method != "brute-force"
        ok_brute += brute_force_safe_orient(h) is not None
    passed = ok_alg == count and ok_brute == count
    return CriterionResult(4, "safe orientation agrees with brute force", passed, {
        "instances": count, "girths": dict(sorted(girths.items())), "safe_orient_ok": ok_alg,
        "brute_force_ok": ok_brute, "constructive": constructive,
    })


def criterion_5(seed: int = 0) -> CriterionResult:
    r = run_fixtures(100, seed)
    theta_g = [c for c in r.checks if c.name.startswith("theta_g")]
    return CriterionResult(5, "tightness graphs are not orientable, smaller GREEN sets are",
                           all(c.passed for c in theta_g), {c.name: c.detail or c.passed for c in theta_g})


def criterion_6(seed: int = 0, max_vertices: int = 6) -> CriterionResult:
    graphs = satisfied = violating = disagree = 0
    for N in range(1, max_vertices + 1):
        pairs = list(combinations(range(N), 2))
        for mask in range(1 << len(pairs)):
            g = Graph(N, tuple(p for i, p in enumerate(pairs) if mask >> i & 1))
            graphs += 1
            cond = check_nash_williams_condition(g, EXACT).satisfied
            try:
                two_forest_partition(g)
                split = True
            except NotTwoForests:
                split = False
            satisfied += cond
            violating += not cond
            disagree += cond != split
    return CriterionResult(6, f"two-forest partition on all graphs with <= {max_vertices} vertices",
                           disagree == 0, {"graphs": graphs, "satisfied": satisfied,
                                           "violating": violating, "disagreements": disagree})


def criterion_7(seed: int = 0, sets_per_seed: int = 1000) -> CriterionResult:
    n = 4
    per_seed = {}
    ok = True
    for s in range(1, 21):
        g = random_locally_sparse(64, s)
        sparse = check_local_sparsity(g, 4 * n, 1.25, EXACT, cap=4 * n).satisfied
        if g.M == 0:
            # empty universe: nothing to store or query
            per_seed[s] = {"M": 0, "sparse": sparse, "vacuous": True}
            continue
        m = 4 * g.M
        r = verify_exhaustive("qa", m, n, Sampled(sets_per_seed, seed + s), graph=g, seed=seed + s)
        inst = build("qa", m, [0], n=n, graph=g)
        kinds = _kinds(inst, 0)
        good = (r.passed and sparse and kinds == [CLASSICAL_READ, QUANTUM_XOR]
                and r.space_bits == g.M + 2 * g.N * math.ceil(m / g.M))
        ok &= good
        per_seed[s] = {"M": g.M, "m": m, "sets": r.sets_tested, "space": r.space_bits,
                       "errors": r.false_positives + r.false_negatives, "ok": good}
    vacuous = sum(1 for v in per_seed.values() if v.get("vacuous"))
    return CriterionResult(7, "quantum adaptive on sparse random graphs N=64, seeds 1..20",
                           ok and vacuous < 20, {"vacuous_seeds": vacuous, "seeds": per_seed})


def _algebraic(number, sid, m, probes, space, seed):
    r = verify_exhaustive(sid, m, 2, ALL_SETS, seed=seed)
    kinds = _kinds(build(sid, m, [1, m - 1]), 1)
    ok = (r.passed and r.max_probes_seen == probes and r.space_bits == space
          and kinds == [QUANTUM_XOR] * probes)
    return CriterionResult(number, f"{sid} exhaustive, m={m}, all |S|<=2", ok, _report_fields(r))


def criterion_8(seed: int = 0) -> CriterionResult:
    res = _algebraic(8, "qn22", 256, 2, 64, seed)
    res.passed = res.passed and res.measured["elapsed"] < 60
    return res


def criterion_9(seed: int = 0) -> CriterionResult:
    return _algebraic(9, "qn23", 216, 3, 36, seed)


def criterion_10(seed: int = 0) -> CriterionResult:
    g = projective_plane_incidence(3)
    K = 4
    m = g.M * K
    r = verify_exhaustive("appx", m, 3, Sampled(1000, seed), graph=g, K=K, seed=seed)
    kinds = _kinds(build("appx", m, [7], n=3, graph=g, K=K), 7)
    ok = (r.passed and g.girth == 6 and r.space_bits == g.M + g.N * K
          and r.max_probes_seen == 2 and kinds == [CLASSICAL_READ, QUANTUM_XOR])
    return CriterionResult(10, "non-adaptive graph scheme at girth 6, n=3", ok, _report_fields(r))


SLOPE_TARGETS = {"ca": (2 / 3, 3), "qn22": (1 / 2, 2), "qn23": (1 / 3, 2)}


def criterion_11(seed: int = 0, tol: float = 0.03) -> CriterionResult:
    out = {}
    ok = True
    for sid, (target, n) in SLOPE_TARGETS.items():
        res = scaling_experiment(sid, n=n, seed=seed)
        s = res.summary()
        good = (abs(s["slope"] - target) <= tol and s["points"] >= 6 and s["decades"] >= 3
                and s["space_exact"])
        ok &= good
        out[sid] = {"slope": round(s["slope"], 4), "target": round(target, 4),
                    "points": s["points"], "decades": s["decades"], "residual": s["residual"]}
    return CriterionResult(11, "space exponents from log-log regression", ok, out)


def criterion_12(seed: int = 0) -> CriterionResult:
    got = [g_min(n) for n in range(2, 10)]
    want = [4, 4, 6, 8, 8, 10, 12, 12]
    return CriterionResult(12, "minimum girth for n = 2..9", got == want, {"got": got, "want": want})


CRITERIA: dict[int, Callable[..., CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
    9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
}


def run_criteria(numbers: Iterable[int] | None = None, seed: int = 0) -> Iterator[CriterionResult]:
    for k in sorted(numbers) if numbers else sorted(CRITERIA):
        start = time.perf_counter()
        res = CRITERIA[k](seed=seed)
        res.elapsed = time.perf_counter() - start
        yield res
