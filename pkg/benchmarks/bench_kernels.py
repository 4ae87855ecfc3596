"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Each row runs the same call on both backends, checks that the outputs are
identical and reports the best wall-clock time of ``--repeat`` runs.
"""

import argparse
import json
import time
from fractions import Fraction

import numpy as np

from neighperc._backend import compiled_kernels, python_kernels
from neighperc.constrained import sample_bond, sub_arrays
from neighperc.lattice import Window
from neighperc.models import TwoEps, kernel_params


def _same(a, b):
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def cases():
    params = kernel_params(TwoEps(0))
    code, _, k, eps, p, cum = params
    # a sample whose exploration runs long enough to time
    for t in range(1000):
        block = compiled_kernels.sample_box(*params, 1, t, [-33, -33], 67)
        if len(compiled_kernels.explore(block, 32, 0, 0, False)[0]) > 1000:
            break
    win = Window((0, 0), 8)
    bonds = [sub_arrays(sample_bond(Fraction(1, 2), win, 2, t), (0, 0), 8) for t in range(20)]

    def search(kern):
        s = kern.Searcher(8)
        return tuple(bool(s.run(h, v)[0]) for h, v in bonds)

    def explore(kern):
        steps, visits, escaped = kern.explore(block, 32, 0, 0, False)
        return steps, visits, bool(escaped)

    return [
        ("sample_box 65x65", lambda kern: kern.sample_box(*params, 1, 0, [-32, -32], 65)),
        ("escape_flags 50 trials n=32",
         lambda kern: kern.escape_flags(*params, 1, 0, 50, 32)),
        ("dual_sizes 50 trials cap=64",
         lambda kern: kern.dual_sizes(code, k, eps, p, cum, 1, 0, 50, 64, 64)),
        ("explore radius 32", explore),
        ("constrained search x20 n=8", search),
        ("saw_count n=10", lambda kern: kern.saw_count(10)),
    ]


def best_time(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", default=None, help="also write the rows here")
    args = ap.parse_args()
    if compiled_kernels is None:
        raise SystemExit("compiled core not available; reinstall with a C compiler")
    rows = []
    print(f"{'kernel':34s} {'python s':>10s} {'cython s':>10s} {'speed-up':>9s}  same")
    for name, fn in cases():
        a, tp = best_time(lambda: fn(python_kernels), args.repeat)
        b, tc = best_time(lambda: fn(compiled_kernels), args.repeat)
        same = _same(a, b)
        rows.append({"kernel": name, "python_s": tp, "cython_s": tc,
                     "speedup": tp / tc if tc else None, "identical": same})
        print(f"{name:34s} {tp:10.4f} {tc:10.5f} {tp / tc:8.0f}x  {same}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
