"""
Verification, scaling experiments and orientation fixtures.

:func:`verify_exhaustive` stores many sets, sweeps every query against the
true indicator and audits transcripts; :func:`scaling_experiment` records
space against universe size and fits the log-log slope; :func:`run_fixtures`
replays the worked orientation examples shipped in ``bitprobe/data``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import random
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidParameter
from .graphs import Graph, parse_graph
from .memory import ProbeTranscript
from .orientation import (
    ColoredGraph,
    Mark,
    blocking_edges,
    brute_force_safe_orient,
    constrained_bfs,
    find_green_dominated_cycle,
    is_green_dominated,
    is_safe,
    safe_orient,
)
from .schemes import (
    PROBE_CLASS,
    PROBES,
    SchemeInstance,
    audit_query,
    build,
    default_graph,
    query,
)

__all__ = [
    "ALL_SETS",
    "Sampled",
    "DEFAULT_BUDGET",
    "enumeration_budget",
    "VerificationReport",
    "verify_exhaustive",
    "ScalingRow",
    "ScalingResult",
    "scaling_experiment",
    "DEFAULT_M_VALUES",
    "FixtureCheck",
    "FixtureReport",
    "run_fixtures",
    "load_fixture",
    "theta_graph",
    "tightness_paths",
    "OrientationCache",
]

log = logging.getLogger(__name__)

ALL_SETS = "all-sets"
DEFAULT_BUDGET = 10**8
BUDGET_ENV = "BITPROBE_BUDGET"


@dataclass(frozen=True)
class Sampled:
    count: int
    seed: int = 0


def enumeration_budget() -> int:
    """(set, query) pairs allowed for exhaustive runs; ``$BITPROBE_BUDGET`` overrides."""
    raw = os.environ.get(BUDGET_ENV)
    return int(float(raw)) if raw else DEFAULT_BUDGET


class OrientationCache:
    """Memoises safe orientations by GREEN edge set (the graph is fixed per run)."""

    def __init__(self):
        self._memo: dict = {}
        self.hits = 0

    def __call__(self, h: ColoredGraph):
        key = (id(h.graph), h.green_edges)
        o = self._memo.get(key)
        if o is None:
            o = self._memo[key] = safe_orient(h)
        else:
            self.hits += 1
        return o


@dataclass
class VerificationReport:
    scheme_id: str
    m: int
    n: int
    t: int
    mode: str
    seed: int | None
    sets_tested: int = 0
    queries_tested: int = 0
    false_positives: int = 0
    false_negatives: int = 0
    sweep_mismatches: int = 0
    max_probes_seen: int = 0
    audits: int = 0
    audit_failures: int = 0
    adaptivity_verdict: str = ""
    space_bits: int = 0
    space_mismatches: int = 0
    elapsed: float = 0.0
    graph_summary: str = ""
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.sets_tested > 0
            and self.false_positives == 0
            and self.false_negatives == 0
            and self.sweep_mismatches == 0
            and self.max_probes_seen <= self.t
            and self.audit_failures == 0
            and self.space_mismatches == 0
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        d["failures"] = [str(f) for f in self.failures[:10]]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _count_sets(m: int, n: int) -> int:
    return sum(math.comb(m, k) for k in range(min(n, m) + 1))


def _all_sets(m: int, n: int) -> Iterator[tuple[int, ...]]:
    for k in range(min(n, m) + 1):
        yield from combinations(range(m), k)


def _sampled_sets(m: int, n: int, count: int, seed: int) -> Iterator[list[int]]:
    rng = random.Random(seed)
    for _ in range(count):
        yield rng.sample(range(m), rng.randint(0, min(n, m)))


def _signature(t: ProbeTranscript) -> tuple:
    # probe path: kinds, regions touched and results seen
    return tuple((e.kind, tuple(a[0] for a in e.addresses), e.result) for e in t.entries)


def verify_exhaustive(
    scheme_id: str,
    m: int,
    n: int,
    mode: str | Sampled = ALL_SETS,
    *,
    graph: Graph | None = None,
    K: int | None = None,
    seed: int = 0,
    budget: int | None = None,
    auto_sample: bool = False,
    sample_count: int = 1000,
) -> VerificationReport:
    """Store each tested set, sweep all ``m`` queries and tally errors.

    For every set the members and one non-member are also queried through
    the probe interface: the answer is compared with the sweep, the probe
    count recorded, and a full replay audit is run for each new probe path.
    ``ALL_SETS`` refuses (:class:`BudgetExceeded`) when the number of
    (set, query) pairs exceeds the budget, unless ``auto_sample`` is set, in
    which case ``sample_count`` random sets are drawn with ``seed``.
    """
    if scheme_id not in PROBES:
        raise InvalidParameter(f"unknown scheme {scheme_id!r}")
    if scheme_id in ("qn22", "qn23") and n > 2:
        raise InvalidParameter(f"{scheme_id} stores at most 2 elements, got n = {n}")
    budget = enumeration_budget() if budget is None else budget
    if mode == ALL_SETS:
        need = _count_sets(m, n) * m
        if need > budget:
            if not auto_sample:
                raise BudgetExceeded(
                    f"ALL_SETS needs {need:.3g} (set, query) pairs, budget is {budget:.3g}; "
                    f"use Sampled(count, seed) or raise ${BUDGET_ENV}"
                )
            log.warning(
                "ALL_SETS needs %d pairs > budget %d; sampling %d sets with seed %d",
                need, budget, sample_count, seed,
            )
            mode = Sampled(sample_count, seed)
    if mode == ALL_SETS:
        sets: Iterable = _all_sets(m, n)
        report = VerificationReport(scheme_id, m, n, PROBES[scheme_id], ALL_SETS, None)
    elif isinstance(mode, Sampled):
        sets = _sampled_sets(m, n, mode.count, mode.seed)
        report = VerificationReport(
            scheme_id, m, n, PROBES[scheme_id], f"sampled({mode.count})", mode.seed
        )
    else:
        raise InvalidParameter(f"mode must be ALL_SETS or Sampled, got {mode!r}")

    if graph is None:
        graph = default_graph(scheme_id, m, n, seed)
    if graph is not None:
        report.graph_summary = f"N={graph.N} M={graph.M} girth={graph.girth}"
    orienter = OrientationCache()
    rng = random.Random(seed)
    seen_paths: set = set()
    truth = np.zeros(m, dtype=bool)
    start = time.perf_counter()
    for S in sets:
        S = list(S)
        if scheme_id == "ca":
            inst = build(scheme_id, m, S, n=n, graph=graph, K=K, orienter=orienter)
        else:
            inst = build(scheme_id, m, S, n=n, graph=graph, K=K)
        truth[S] = True
        answers = inst.sweep()
        fp = int(np.count_nonzero(answers & ~truth))
        fn = int(np.count_nonzero(~answers & truth))
        report.false_positives += fp
        report.false_negatives += fn
        if fp or fn:
            report.failures.append(("errors", S, fp, fn))
        if inst.space_bits != inst.formula_bits():
            report.space_mismatches += 1
        report.space_bits = max(report.space_bits, inst.space_bits)
        probes = list(S)
        if len(S) < m:
            x = rng.randrange(m)
            while truth[x]:
                x = (x + 1) % m
            probes.append(x)
        for x in probes:
            _probe_check(inst, x, answers, report, seen_paths)
        truth[S] = False
        report.sets_tested += 1
        report.queries_tested += m
    report.elapsed = time.perf_counter() - start
    cls = PROBE_CLASS[scheme_id]
    report.adaptivity_verdict = f"{cls} {'PASS' if report.audit_failures == 0 else 'FAIL'}"
    return report


def _probe_check(inst: SchemeInstance, x: int, answers, report: VerificationReport, seen) -> None:
    t = ProbeTranscript(inst.probe_class)
    ans = query(inst, x, t)
    if ans != bool(answers[x]):
        report.sweep_mismatches += 1
        report.failures.append(("sweep", x))
    report.max_probes_seen = max(report.max_probes_seen, len(t))
    sig = _signature(t)
    if sig in seen:
        return
    seen.add(sig)
    verdict = audit_query(inst, x)
    report.audits += 1
    if not verdict.passed:
        report.audit_failures += 1
        report.failures.append(("audit", x, verdict.detail))


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------

DEFAULT_M_VALUES = {
    "ca": [2**k for k in range(10, 21, 2)],
    "qa": [2**k for k in range(10, 21, 2)],
    "appx": [2**k for k in range(10, 21, 2)],
    "qn22": [2**k for k in range(8, 21, 2)],
    "qn23": [2**k for k in range(9, 22, 2)],
    "cv": [2**k for k in range(8, 21, 2)],
}


@dataclass(frozen=True)
class ScalingRow:
    scheme_id: str
    m: int
    n: int
    space_bits: int
    formula_bits: int


@dataclass
class ScalingResult:
    rows: list[ScalingRow]
    slope: float
    intercept: float
    residual: float

    @property
    def decades(self) -> float:
        ms = [r.m for r in self.rows]
        return math.log10(max(ms) / min(ms))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scheme_id", "m", "n", "space_bits", "formula_bits"])
        for r in self.rows:
            w.writerow([r.scheme_id, r.m, r.n, r.space_bits, r.formula_bits])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "scheme_id": self.rows[0].scheme_id if self.rows else None,
            "points": len(self.rows),
            "decades": round(self.decades, 3),
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "space_exact": all(r.space_bits == r.formula_bits for r in self.rows),
        }


def scaling_experiment(
    scheme_id: str, m_values: Sequence[int] | None = None, n: int = 2, seed: int = 0
) -> ScalingResult:
    """Build one instance per ``m`` (storing a random set of size ``n``) and
    fit ``log(space) = slope * log(m) + intercept`` by least squares.

    ``residual`` is the root-mean-square residual of the fit.
    """
    if m_values is None:
        m_values = DEFAULT_M_VALUES[scheme_id]
    if len(m_values) < 2:
        raise InvalidParameter("need at least two universe sizes to fit a slope")
    rng = random.Random(seed)
    rows = []
    for m in m_values:
        S = rng.sample(range(m), min(n, m))
        inst = build(scheme_id, m, S, n=n, seed=seed)
        rows.append(ScalingRow(scheme_id, m, n, inst.space_bits, inst.formula_bits()))
    x = np.log([r.m for r in rows])
    y = np.log([r.space_bits for r in rows])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return ScalingResult(rows, float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))


# ---------------------------------------------------------------------------
# orientation fixtures
# ---------------------------------------------------------------------------


def theta_graph(paths: Sequence[str]) -> ColoredGraph:
    """Internally disjoint paths between vertices 0 and 1, coloured by strings over ``GR``.

    Each string lists the edge colours from vertex 0 to vertex 1; internal
    vertices are numbered consecutively, path by path.
    """
    edges: list[tuple[int, int]] = []
    green: list[tuple[int, int]] = []
    nxt = 2
    for colours in paths:
        if not colours or set(colours) - {"G", "R"}:
            raise InvalidParameter(f"path colouring must be a non-empty string over 'GR', got {colours!r}")
        prev = 0
        for j, c in enumerate(colours):
            cur = 1 if j == len(colours) - 1 else nxt
            if cur != 1:
                nxt += 1
            e = (min(prev, cur), max(prev, cur))
            edges.append(e)
            if c == "G":
                green.append(e)
            prev = cur
    g = Graph.from_edges(nxt, edges)
    return ColoredGraph.from_pairs(g, green)


def tightness_paths(length: int) -> list[str]:
    """Three path colourings of the given length whose theta graph has girth
    ``2 * length`` and ``floor(3g/4) + 1`` GREEN edges but no safe orientation."""
    if length < 2:
        raise InvalidParameter(f"path length must be at least 2, got {length}")
    k, odd = divmod(length, 2)
    if odd:
        return ["G" + "RG" * k, "G" + "RG" * k, "R" + "GR" * k]
    return ["GR" * k, "G" + "RG" * (k - 1) + "G", "RG" * k]


def load_fixture(name: str) -> ColoredGraph:
    """Coloured graph ``name`` from the package data (``.graph`` plus ``.green``)."""
    base = resources.files("bitprobe") / "data"
    g = parse_graph((base / f"{name}.graph").read_text())
    pairs = [
        tuple(int(t) for t in line.split())
        for line in (base / f"{name}.green").read_text().splitlines()
        if line.strip()
    ]
    return ColoredGraph.from_pairs(g, pairs)


@dataclass(frozen=True)
class FixtureCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class FixtureReport:
    checks: list[FixtureCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [asdict(c) for c in self.checks]}


def _same_cycle(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) != len(b):
        return False
    k = len(a)
    for seq in (list(b), list(reversed(b))):
        for r in range(k):
            if list(a) == seq[r:] + seq[:r]:
                return True
    return False


def run_fixtures(subset_samples: int = 100, seed: int = 0) -> FixtureReport:
    checks: list[FixtureCheck] = []

    h = load_fixture("bfs_marks")
    f = constrained_bfs(h, [0])
    marks = {v: f.vertex_mark[v] for v in range(h.graph.N)}
    want = {0: Mark.GREEN, 1: Mark.GREEN, 5: Mark.GREEN, 7: Mark.GREEN,
            2: Mark.RED, 3: Mark.RED, 4: Mark.RED,
            6: Mark.UNVISITED, 8: Mark.UNVISITED, 9: Mark.UNVISITED}
    checks.append(FixtureCheck("bfs_marks vertex marks", marks == want,
                               " ".join(f"v{v}={m.name}" for v, m in marks.items())))
    found = {h.graph.edges[e] for e in blocking_edges(h, f)}
    checks.append(FixtureCheck("bfs_marks blocking edges", found == {(2, 4), (5, 7)}, str(sorted(found))))

    h = load_fixture("bfs_cycle")
    f = constrained_bfs(h, [0])
    found = {h.graph.edges[e] for e in blocking_edges(h, f)}
    checks.append(FixtureCheck("bfs_cycle blocking edge", found == {(5, 6)}, str(sorted(found))))
    cyc = find_green_dominated_cycle(h)
    ok = cyc is not None and is_green_dominated(h, cyc) and _same_cycle(cyc, (0, 1, 5, 6, 2))
    checks.append(FixtureCheck("bfs_cycle green-dominated cycle", ok, str(cyc)))

    rng = random.Random(seed)
    for name, girth in (("theta_g10", 10), ("theta_g8", 8)):
        h = load_fixture(name)
        cap = (3 * girth) // 4
        checks.append(FixtureCheck(
            f"{name} girth and colouring",
            h.graph.girth == girth and h.n_green == cap + 1,
            f"girth={h.graph.girth} green={h.n_green}",
        ))
        none = brute_force_safe_orient(h) is None
        checks.append(FixtureCheck(f"{name} has no safe orientation", none))
        bad = 0
        for _ in range(subset_samples):
            sub = ColoredGraph(h.graph, frozenset(rng.sample(range(h.graph.M), cap)))
            o = safe_orient(sub)
            if not is_safe(sub, o) or brute_force_safe_orient(sub) is None:
                bad += 1
        checks.append(FixtureCheck(
            f"{name} random GREEN sets of size {cap} orientable", bad == 0,
            f"{subset_samples - bad}/{subset_samples}",
        ))
    return FixtureReport(checks)
