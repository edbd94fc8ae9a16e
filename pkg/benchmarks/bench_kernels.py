"""Time the numba and numpy kernel backends on model circuits.

    python benchmarks/bench_kernels.py [--batch 1000] [--repeats 5]

Prints one row per (architecture, backend): best-of-N seconds for a forward
pass and for a forward+adjoint gradient sweep, and the speedup of numba
over numpy. Results of the two backends are cross-checked before timing.
"""
import argparse
import time

import numpy as np

from qnnspectra import kernels, model
from qnnspectra.model import ArchitectureSpec

CASES = [
    ("hamming", 1, 1, 1, "univariate"),
    ("exponential", 2, 1, 1, "univariate"),
    ("ternary", 2, 3, 1, "univariate"),
    ("golomb", 6, 1, 1, "univariate"),
    ("exponential", 2, 1, 4, "sequential"),
    ("binary", 2, 1, 4, "parallel"),
]


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=1000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)
    impls = {name: kernels.load(name) for name in kernels.BACKENDS}
    rng = np.random.default_rng(0)

    print(f"{'architecture':<34}{'backend':<8}{'forward s':>12}{'gradient s':>12}{'speedup':>9}")
    for fam, R, L, N, mode in CASES:
        spec = ArchitectureSpec(fam, R, L, N=N, ansatz_mode=mode)
        c = model.build(spec)
        ops, diag = c.program
        n = c.qubit_count
        theta = model.init_params(c, 1)
        X = rng.uniform(-1, 1, (args.batch, N))
        w = rng.normal(size=args.batch)

        ref = None
        for impl in impls.values():
            out = impl.adjoint(ops, diag, n, theta, X, w)
            if ref is None:
                ref = out
            else:
                assert np.allclose(out[0], ref[0], atol=1e-10) and np.allclose(out[1], ref[1], atol=1e-9)

        label = f"{fam} ({R},{L}) N={N} {mode}"
        timings = {}
        for name, impl in impls.items():
            fwd = best_of(lambda: impl.expval_z0(impl.forward(ops, diag, n, theta, X), n), args.repeats)
            grad = best_of(lambda: impl.adjoint(ops, diag, n, theta, X, w), args.repeats)
            timings[name] = (fwd, grad)
        for name, (fwd, grad) in timings.items():
            speed = timings["numpy"][1] / grad if name == "numba" else 1.0
            print(f"{label:<34}{name:<8}{fwd:>12.5f}{grad:>12.5f}{speed:>8.1f}x")


if __name__ == "__main__":
    main()
