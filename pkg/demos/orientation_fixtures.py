"""Safe orientations on small coloured graphs, and the theta graphs where
one extra GREEN edge makes them impossible."""

from bitprobe import brute_force_safe_orient, is_safe, safe_orient
from bitprobe.harness import load_fixture, run_fixtures, theta_graph, tightness_paths
from bitprobe.orientation import blocking_edges, constrained_bfs, find_green_dominated_cycle

# the two search examples have odd girth, so only the search itself is shown
for name in ("bfs_marks", "bfs_cycle"):
    h = load_fixture(name)
    f = constrained_bfs(h, [0])
    marks = " ".join(f"{v}:{m.name[0]}" for v, m in enumerate(f.vertex_mark))
    blocks = [h.graph.edges[e] for e in blocking_edges(h, f)]
    print(f"{name}: marks {marks}  blocking {blocks}  cycle {find_green_dominated_cycle(h)}")

h = theta_graph(["GRGR", "RGRG", "GRRG"])
o = safe_orient(h)
print(f"theta girth {h.graph.girth}, {h.n_green} GREEN: method={o.method} safe={is_safe(h, o)}")

for length in range(2, 7):
    paths = tightness_paths(length)
    h = theta_graph(paths)
    none = brute_force_safe_orient(h) is None
    print(f"theta {' '.join(paths):<28} girth={h.graph.girth:2d} green={h.n_green:2d} unorientable={none}")

for c in run_fixtures(50).checks:
    print(f"  [{'ok' if c.passed else 'FAIL'}] {c.name} {c.detail}")
