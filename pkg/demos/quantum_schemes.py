"""Parity-probe schemes side by side: stored sizes and probe transcripts."""

from bitprobe import ProbeTranscript, audit_query, build, projective_plane_incidence

cases = [
    ("qn22", 10_000, [17, 8_765], {}),
    ("qn23", 27_000, [17, 20_001], {}),
    ("qa", 4_000, [3, 1_500, 2_999], {"n": 3}),
    ("appx", 208, [1, 50, 100], {"n": 3, "graph": projective_plane_incidence(3), "K": 4}),
    ("cv", 10_000, [17, 8_765], {}),
]
for sid, m, S, kw in cases:
    inst = build(sid, m, S, **kw)
    x = S[-1]
    t = ProbeTranscript(inst.probe_class)
    inst.query(x, t)
    v = audit_query(inst, x)
    kinds = ",".join(e.kind for e in t.entries)
    print(f"{sid:5s} m={m:6d} bits={inst.space_bits:6d} class={inst.probe_class:12s} "
          f"probes={kinds} audit={'ok' if v.passed else 'FAIL'}")
    assert (inst.sweep().nonzero()[0] == sorted(S)).all()

# qa only beats the characteristic vector once m is far beyond desk scale
print("\ntranscript of qn22 query 17:")
t = ProbeTranscript()
build("qn22", 10_000, [17, 8_765]).query(17, t)
print(t.to_jsonl(), end="")
