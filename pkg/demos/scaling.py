"""Fit space against universe size on a log-log scale for each scheme."""

from bitprobe import scaling_experiment

for sid, n in (("ca", 3), ("qa", 2), ("qn22", 2), ("qn23", 2), ("appx", 3), ("cv", 2)):
    res = scaling_experiment(sid, n=n)
    s = res.summary()
    print(f"{sid:5s} n={n} slope={s['slope']:.4f} points={s['points']} "
          f"decades={s['decades']:.2f} rms={s['residual']:.3f} exact={s['space_exact']}")
