"""Compare the compiled elimination kernels with the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--seed 0]

Part 1 times each kernel on random integer matrices in-process.  Part 2 runs a
cohomology table end to end in two subprocesses, one with
OMEGARB_PURE_PYTHON=1, and checks that both print the same dimensions.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from omegarb import _kernels_py

try:
    from omegarb import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

ROOT = Path(__file__).resolve().parents[1]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def cases(rng):
    dense = rng.integers(-3, 4, size=(70, 70))
    dense[:, 35:] = dense[:, :35] @ rng.integers(-1, 2, size=(35, 35))  # rank <= 35
    rows = [list(map(int, r)) for r in dense]
    sparse = []
    for _ in range(400):
        cols = rng.choice(300, size=6, replace=False)
        sparse.append({int(c): int(v) for c, v in zip(cols, rng.integers(-2, 3, size=6)) if v})
    modp = rng.integers(0, 101, size=(150, 150))
    return [
        ("bareiss_rank 70x70", lambda k: k.bareiss_rank(rows, 70)),
        ("sparse_echelon QQ 400x300", lambda k: len(k.sparse_echelon(sparse, 0))),
        ("sparse_echelon GF(101)", lambda k: len(k.sparse_echelon(sparse, 101))),
        ("rank_mod_p 150x150", lambda k: k.rank_mod_p(modp, 101)),
    ]


def end_to_end(fixture, complex_kind, degree):
    cmd = [sys.executable, "-m", "omegarb", "--format", "text", "cohomology", str(fixture),
           "--complex", complex_kind, "--max-degree", str(degree)]
    out = {}
    for label, env_value in (("compiled", "0"), ("python", "1")):
        env = dict(os.environ, OMEGARB_PURE_PYTHON=env_value)
        t = time.perf_counter()
        res = subprocess.run(cmd, capture_output=True, text=True, env=env, check=False)
        out[label] = (time.perf_counter() - t, res.stdout.splitlines()[0] if res.stdout else res.stderr)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    print(f"{'kernel':28s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}")
    for name, fn in cases(rng):
        tp, rp = best_of(lambda: fn(_kernels_py), args.repeat)
        if _compiled is None:
            print(f"{name:28s} {tp:10.4f} {'n/a':>11s} {'':>8s}")
            continue
        tc, rc = best_of(lambda: fn(_compiled), args.repeat)
        assert rp == rc, f"{name}: backends disagree ({rp} vs {rc})"
        print(f"{name:28s} {tp:10.4f} {tc:11.4f} {tp / tc:7.1f}x")

    if not args.skip_end_to_end:
        fx = ROOT / "fixtures" / "relative_z2.json"
        res = end_to_end(fx, "relrba", 3)
        print()
        for label, (t, line) in res.items():
            print(f"end-to-end relrba n<=3 [{label:8s}] {t:6.2f} s  {line}")
        if res["compiled"][1] != res["python"][1]:
            print("WARNING: backends printed different tables")
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
