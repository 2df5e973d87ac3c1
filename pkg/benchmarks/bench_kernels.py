"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--dims 3 6 12] [--number 2000]
"""
import argparse
import timeit

import numpy as np

from modeflow import _kernels_py as py
from modeflow.oracle import random_hamiltonian, random_state
from modeflow.qstate import gibbs_weights

try:
    from modeflow import _ckernels as ck
except ImportError:  # extension not built
    ck = None


def cases(d, rng):
    H = random_hamiltonian(rng, d)
    rho = np.ascontiguousarray(np.asarray(random_state(rng, d)))
    absrho = np.ascontiguousarray(np.abs(rho))
    L = np.ascontiguousarray(rng.dirichlet(np.ones(d), size=d).T)
    labels, k = H.modes.labels, len(H.modes.frequencies)
    wn, wm = np.ascontiguousarray(L[1]), np.ascontiguousarray(L[0])
    g = gibbs_weights(np.arange(d, dtype=float), 0.7)
    curves = []
    for _ in range(2):
        p = rng.dirichlet(np.ones(d))
        order = np.argsort(-p / g)
        x = np.concatenate([[0.0], np.cumsum(g[order])])
        y = np.concatenate([[0.0], np.cumsum(p[order])])
        x[-1] = y[-1] = 1.0
        curves.append((x, y))
    (x1, y1), (x2, y2) = curves
    return {
        "mode_l1_all": lambda m: m.mode_l1_all(rho, labels, k),
        "coherence_bound": lambda m: m.coherence_bound(absrho, wn, wm, labels, labels[1, 0], True),
        "thermal_bound_sum": lambda m: m.thermal_bound_sum(absrho, H.array, labels, 1, 0, 0.7),
        "lorenz_dominates": lambda m: m.lorenz_dominates(x1, y1, x2, y2, 1e-12),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[3, 6, 12])
    ap.add_argument("--number", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if ck is None:
        raise SystemExit("compiled extension not available; build with `pip install -e .`")

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<18} {'d':>3} {'numpy us':>10} {'cython us':>10} {'speedup':>8}")
    for d in args.dims:
        for name, fn in cases(d, rng).items():
            t_py = min(timeit.repeat(lambda: fn(py), number=args.number, repeat=3)) / args.number
            t_ck = min(timeit.repeat(lambda: fn(ck), number=args.number, repeat=3)) / args.number
            print(f"{name:<18} {d:>3} {t_py * 1e6:>10.2f} {t_ck * 1e6:>10.2f} {t_py / t_ck:>8.1f}")


if __name__ == "__main__":
    main()
