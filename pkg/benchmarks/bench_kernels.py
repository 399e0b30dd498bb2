"""Compare the compiled kernels with the pure-Python fallback.

Run with ``python benchmarks/bench_kernels.py``. Each kernel is timed on the
same inputs under both backends; the output table reports the best of a few
repeats and the resulting speedup.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from brickqec import _core
from brickqec.brickwork import BlockLayout, BrickworkSpec, schedule_arrays
from brickqec.domainwall import initial_masks
from brickqec.pauli import CliffordTableau, two_qubit_tables


def bench_gate_transfer(mod, n=20):
    v = np.random.default_rng(0).random(2**n)
    pairs = [(i, (i + 1) % n) for i in range(n)]

    def run():
        for x, y in pairs:
            mod.gate_transfer(v, n, x, y, 0.4)

    return run


def bench_local_table(mod, n=48, gates=2000):
    images, phases = two_qubit_tables()
    rng = np.random.default_rng(1)
    idx = rng.integers(0, 11520, size=gates)
    qs = [tuple(int(q) for q in rng.choice(n, 2, replace=False)) for _ in range(gates)]

    def run():
        t = CliffordTableau.identity(n)
        for g, (x, y) in zip(idx, qs):
            mod.apply_local_table(t.xs, t.zs, t.phases, x, y, images[g], phases[g])

    return run


def bench_enumeration(mod, layout=(1, 2, 3), depth=4):
    spec = BrickworkSpec(BlockLayout(*layout), depth)
    xs, ys = schedule_arrays(spec)
    init = initial_masks(spec)
    return lambda: mod.enumerate_counts(spec.n, xs, ys, init)


CASES = {
    "gate_transfer (n=20, one sweep)": bench_gate_transfer,
    "apply_local_table (n=48, 2000 gates)": bench_local_table,
    "enumerate_counts (n=6, D=4)": bench_enumeration,
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = _core.backends()
    if "cython" not in backends:
        print("compiled extension not available; only the fallback is timed")
    print(f"{'kernel':40s} " + " ".join(f"{name:>10s}" for name in backends) + "   speedup")
    for label, make in CASES.items():
        times = {}
        for name, mod in backends.items():
            fn = make(mod)
            fn()  # warm-up
            times[name] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:40s} " + " ".join(f"{t:10.4f}" for t in times.values()) + f"   {speed:7.1f}x")


if __name__ == "__main__":
    main()
