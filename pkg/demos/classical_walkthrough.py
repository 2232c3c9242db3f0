"""Store three elements on K_{4,4} with the two-probe adaptive scheme and
watch where each query looks."""

from bitprobe import ProbeTranscript, build, complete_bipartite

g = complete_bipartite(4)
S = [5, 42, 91]
inst = build("ca", 96, S, n=3, graph=g, K=6)
print(f"graph: N={g.N} M={g.M} girth={g.girth}; space {inst.space_bits} bits (m = 96)")
print("A (one bit per edge):", "".join(map(str, inst.store.region("A"))))

for x in (5, 42, 6, 60):
    t = ProbeTranscript(inst.probe_class)
    ans = inst.query(x, t)
    e, i = inst.code.decode(x)
    u, v = g.edges[e]
    path = " -> ".join(f"{a[0][0]}[{a[0][1]}]={en.result}" for en in t.entries for a in [en.addresses])
    print(f"x={x:2d}  edge {e} ({u},{v}) slot {i}:  {path}  => {'member' if ans else 'absent'}")

assert (inst.sweep().nonzero()[0] == S).all()
