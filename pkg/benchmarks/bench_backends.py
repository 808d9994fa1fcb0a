"""Compare the compiled walk kernel against the numpy reference.

Runs identical pre-generated walks through both backends on a few
representative shapes, reporting wall time, speedup, and the spread
between the two final values. The backends are not bit-identical by
design (summation order differs inside the objective), so the value
column shows the observed difference rather than asserting zero; on
short walks it is usually at machine precision.

Usage: python3 benchmarks/bench_backends.py [--steps N] [--repeat R] [--seed S]
"""

from __future__ import annotations

import argparse
import importlib
import time

import numpy as np

from riuent.haar import RngStream, haar_state


def load_backends():
    from riuent._kernels import pyref

    backends = {"python": pyref.walk}
    try:
        native = importlib.import_module("riuent._kernels._native")
    except ImportError:
        print("note: compiled backend not available, benchmarking pure python only")
    else:
        backends["native"] = native.walk
    return backends


def make_walk_args(dims, steps, kind, q, rng):
    st = haar_state(dims, rng.substream(0))
    n = len(dims)
    g = rng.substream(1).generator
    u = g.random(steps)
    axes = np.minimum((u * n).astype(np.int64), n - 1)
    dper = np.asarray(dims)[axes]
    normals = g.standard_normal(int((2 * dper * dper).sum()))
    return (
        st.array.ravel().copy(),
        np.asarray(dims, dtype=np.int64),
        kind,
        q,
        steps,
        0.5,
        1e-4,
        0.95,
        50,
        axes,
        normals,
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = load_backends()
    cases = [
        ((2, 2, 2), 1, 0.0, "3 qubits, Shannon"),
        ((2, 2, 2), 2, 0.0, "3 qubits, -log max p"),
        ((2, 2, 2, 2), 0, 2.0, "4 qubits, q=2"),
        ((3, 3, 3), 1, 0.0, "3 qutrits, Shannon"),
        ((4, 4, 4), 1, 0.0, "3 ququarts, Shannon"),
    ]

    print(f"{'case':<24} " + " ".join(f"{name:>12}" for name in backends) + "   value spread")
    for ci, (dims, kind, q, label) in enumerate(cases):
        rng = RngStream(args.seed, ci)
        wargs = make_walk_args(dims, args.steps, kind, q, rng)
        times = {}
        values = {}
        for name, walk in backends.items():
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                out = walk(*wargs)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
            values[name] = out[0]
        spread = max(values.values()) - min(values.values())
        row = f"{label:<24} " + " ".join(f"{1e3 * times[n]:>9.1f} ms" for n in backends)
        if len(backends) > 1:
            row += f"   {spread:.2e}"
            row += f"  ({times['python'] / times['native']:.0f}x)"
        print(row)


if __name__ == "__main__":
    main()
