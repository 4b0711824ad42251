"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--sizes 200 800] [--repeat 5]

Prints one row per (kernel, size) with the best-of-``repeat`` wall time of
each backend and the speedup; ``--json`` writes the same rows to a file.
"""
import argparse
import json
import timeit

import numpy as np

from minkembed import kernels


def _cases(n, rng):
    X = rng.random((n, 2))
    D = np.ascontiguousarray(np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1)))
    order = np.arange(n, dtype=np.int64)
    return {
        "greedy_net": lambda be: be.greedy_net(D, order, 0.05),
        "farthest_order": lambda be: be.farthest_order(D, 0),
        "fp_cover_count": lambda be: be.fp_cover_count(D, order, 0.05),
        "sup_ball_cover": lambda be: be.sup_ball_cover(D, 0.2, 0.05),
        "greedy_coloring": lambda be: be.greedy_coloring(D, order, 0.1),
        "pair_distances": lambda be: be.pair_distances(X),
        "triangle_violation": lambda be: be.triangle_violation(D, 1e-12),
    }


def run(sizes, repeat, seed=0):
    names = kernels.available_backends()
    backends = {b: kernels.get_backend(b) for b in names}
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        for kernel, call in _cases(n, rng).items():
            row = {"kernel": kernel, "n": n}
            for b, be in backends.items():
                row[b] = min(timeit.repeat(lambda: call(be), number=1, repeat=repeat))
            if "cython" in row:
                row["speedup"] = row["python"] / row["cython"]
            rows.append(row)
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 800])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the rows here")
    args = ap.parse_args(argv)
    rows = run(args.sizes, args.repeat)
    print(f"{'kernel':<20}{'n':>6}{'python s':>12}{'cython s':>12}{'speedup':>9}")
    for r in rows:
        cy = f"{r['cython']:12.5f}" if "cython" in r else f"{'n/a':>12}"
        sp = f"{r['speedup']:9.1f}" if "speedup" in r else f"{'':>9}"
        print(f"{r['kernel']:<20}{r['n']:>6}{r['python']:12.5f}{cy}{sp}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
