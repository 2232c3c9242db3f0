"""Command-line interface: ``bitprobe <command> ...``.

Results go to stdout as JSON (CSV for ``scale``); the exit status is 1 when
a check fails and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from . import graphs as G
from .errors import BitprobeError
from .forests import two_forest_partition
from .harness import ALL_SETS, Sampled, run_fixtures, scaling_experiment, verify_exhaustive
from .memory import ProbeTranscript
from .orientation import ColoredGraph, brute_force_safe_orient, is_safe, safe_orient
from .schemes import SCHEME_IDS, build, load_instance, query, save_instance


def _ints(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def _params(text: str | None) -> dict[str, str]:
    out = {}
    for item in (text or "").split(","):
        if item.strip():
            key, _, val = item.partition("=")
            out[key.strip()] = val.strip()
    return out


def _finite(x):
    return "infinite" if x == G.INFINITE else x


def _emit(obj) -> None:
    print(json.dumps(obj, default=str))


def _edge_list(g: G.Graph, text: str) -> list[int]:
    """Edges given as indices (``3``) or endpoint pairs (``0-5``)."""
    out = []
    for tok in (text or "").replace(" ", "").split(","):
        if not tok:
            continue
        if "-" in tok:
            u, v = (int(t) for t in tok.split("-"))
            out.append(g.edge_index(u, v))
        else:
            out.append(int(tok))
    return out


# -- graph -------------------------------------------------------------------


def cmd_graph_build(a) -> int:
    p = _params(a.params)
    fam = a.family
    if fam == "kbb":
        g = G.complete_bipartite(int(p.get("a", 4)))
    elif fam == "pp":
        g = G.projective_plane_incidence(int(p.get("q", 3)))
    elif fam == "wenger":
        g = G.wenger_graph(int(p.get("k", 3)), int(p.get("p", 3)))
    elif fam == "sparse":
        g = G.random_locally_sparse(int(p.get("N", 64)), a.seed, float(Fraction(p.get("scale", "1/50"))))
    else:
        side = int(p.get("a", 20))
        base = G.random_bipartite_graph(side, side, float(p.get("p", 0.2)), a.seed)
        g = G.prune_to_girth(base, int(p.get("girth", 10)), a.seed)
    G.write_graph(g, a.out)
    _emit({"family": fam, "N": g.N, "M": g.M, "girth": _finite(g.girth), "out": a.out})
    return 0


def cmd_graph_girth(a) -> int:
    c = G.read_graph(a.file).girth_certificate
    _emit({"girth": _finite(c.girth), "witness_cycle": list(c.witness_cycle)})
    return 0


def cmd_graph_sparsity(a) -> int:
    g = G.read_graph(a.file)
    r = G.check_local_sparsity(
        g, a.k, Fraction(a.alpha), a.mode, trials=a.trials, seed=a.seed, cap=a.cap
    )
    _emit({
        "satisfied": r.satisfied, "violating_set": list(r.violating_set),
        "induced_edge_count": r.induced_edge_count, "mode": r.mode,
        "trials": r.trials, "seed": r.seed,
    })
    return 0


# -- orientation and forests ---------------------------------------------------


def cmd_orient(a) -> int:
    g = G.read_graph(a.graph)
    h = ColoredGraph(g, frozenset(_edge_list(g, a.green)))
    if a.brute_force:
        o = brute_force_safe_orient(h)
        if o is None:
            _emit({"safe": False, "bits": None, "method": "brute-force"})
            return 1
    else:
        o = safe_orient(h)
    ok = is_safe(h, o)
    _emit({"safe": ok, "bits": "".join(map(str, o.bits)), "method": o.method,
           "heads": [o.head(g, e) for e in range(g.M)]})
    return 0 if ok else 1


def cmd_forests_split(a) -> int:
    g = G.read_graph(a.graph)
    part = two_forest_partition(g, _ints(a.subset) if a.subset else None)
    _emit({
        "forest1": [list(g.edges[e]) for e in sorted(part.forest1)],
        "forest2": [list(g.edges[e]) for e in sorted(part.forest2)],
    })
    return 0


# -- schemes --------------------------------------------------------------------


def cmd_scheme_build(a) -> int:
    graph = G.read_graph(a.graph) if a.graph else None
    inst = build(a.scheme, a.m, _ints(a.set), n=a.n, graph=graph, K=a.K, seed=a.seed)
    save_instance(inst, a.out)
    _emit({"scheme": inst.scheme_id, "m": inst.m, "n": inst.n, "t": inst.t,
           "space_bits": inst.space_bits, "regions": inst.store.layout, "out": a.out})
    return 0


def cmd_scheme_query(a) -> int:
    inst = load_instance(a.state)
    t = ProbeTranscript(inst.probe_class)
    ans = query(inst, a.x, t)
    if a.dump_transcript == "-":
        sys.stdout.write(t.to_jsonl())
    elif a.dump_transcript:
        with open(a.dump_transcript, "w") as fh:
            fh.write(t.to_jsonl())
    _emit({"x": a.x, "member": ans, "probes": len(t)})
    return 0


# -- harness --------------------------------------------------------------------


def cmd_verify(a) -> int:
    graph = G.read_graph(a.graph) if a.graph else None
    mode = ALL_SETS if a.mode == "all" else Sampled(a.count, a.seed)
    r = verify_exhaustive(a.scheme, a.m, a.n, mode, graph=graph, K=a.K, seed=a.seed,
                          auto_sample=True, sample_count=a.count)
    _emit(r.to_dict())
    return 0 if r.passed else 1


def cmd_scale(a) -> int:
    res = scaling_experiment(a.scheme, _ints(a.m_values) or None, a.n, a.seed)
    csv_text = res.to_csv()
    if a.csv:
        with open(a.csv, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    _emit(res.summary())
    return 0 if all(r.space_bits == r.formula_bits for r in res.rows) else 1


def cmd_fixtures(a) -> int:
    r = run_fixtures(a.samples, a.seed)
    _emit(r.to_dict())
    return 0 if r.passed else 1


def cmd_accept(a) -> int:
    from .acceptance import run_criteria

    ok = True
    for res in run_criteria(_ints(a.only) or None, a.seed):
        print(res.to_json(), flush=True)
        ok &= res.passed
    return 0 if ok else 1


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bitprobe", description="Bit-probe membership schemes.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    gp = sub.add_parser("graph", help="build and analyse graphs").add_subparsers(dest="graph_cmd", required=True)
    b = gp.add_parser("build")
    b.add_argument("--family", choices=["kbb", "pp", "wenger", "sparse", "prune"], required=True)
    b.add_argument("--params", help="comma-separated key=value, e.g. a=4 or k=3,p=5")
    b.add_argument("--out", required=True)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_graph_build)
    b = gp.add_parser("girth")
    b.add_argument("file")
    b.set_defaults(func=cmd_graph_girth)
    b = gp.add_parser("sparsity")
    b.add_argument("file")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--alpha", default="5/4")
    b.add_argument("--mode", choices=[G.EXACT, G.SAMPLED], default=G.EXACT)
    b.add_argument("--trials", type=int, default=10_000)
    b.add_argument("--cap", type=int, default=G.DEFAULT_SUBSET_CAP)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_graph_sparsity)

    b = sub.add_parser("orient", help="safe orientation of a coloured graph")
    b.add_argument("--graph", required=True)
    b.add_argument("--green", default="", help="GREEN edges as indices or u-v pairs")
    b.add_argument("--brute-force", action="store_true")
    b.set_defaults(func=cmd_orient)

    fp = sub.add_parser("forests").add_subparsers(dest="forests_cmd", required=True)
    b = fp.add_parser("split")
    b.add_argument("--graph", required=True)
    b.add_argument("--subset")
    b.set_defaults(func=cmd_forests_split)

    sp = sub.add_parser("scheme").add_subparsers(dest="scheme_cmd", required=True)
    b = sp.add_parser("build")
    b.add_argument("--scheme", choices=SCHEME_IDS, required=True)
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--n", type=int)
    b.add_argument("--graph")
    b.add_argument("--K", type=int)
    b.add_argument("--set", default="")
    b.add_argument("--out", required=True)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_scheme_build)
    b = sp.add_parser("query")
    b.add_argument("--state", required=True)
    b.add_argument("--x", type=int, required=True)
    b.add_argument("--dump-transcript", nargs="?", const="-", default=None,
                   help="write the probe transcript as JSON lines (stdout or FILE)")
    b.set_defaults(func=cmd_scheme_query)

    b = sub.add_parser("verify", help="zero-error verification over stored sets")
    b.add_argument("--scheme", choices=SCHEME_IDS, required=True)
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--mode", choices=["all", "sampled"], default="all")
    b.add_argument("--count", type=int, default=1000)
    b.add_argument("--graph")
    b.add_argument("--K", type=int)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_verify)

    b = sub.add_parser("scale", help="space against universe size")
    b.add_argument("--scheme", choices=SCHEME_IDS, required=True)
    b.add_argument("--n", type=int, default=2)
    b.add_argument("--m-values", help="comma-separated universe sizes")
    b.add_argument("--csv", help="write rows here instead of stdout")
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_scale)

    b = sub.add_parser("fixtures", help="worked orientation examples")
    b.add_argument("--samples", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_fixtures)

    b = sub.add_parser("accept", help="run the numbered acceptance checks")
    b.add_argument("--only", help="comma-separated criterion numbers")
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_accept)
    return p


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (BitprobeError, KeyError, OSError) as exc:
        print(f"bitprobe: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
