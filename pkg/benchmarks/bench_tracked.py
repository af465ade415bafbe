"""Timing comparison of the tracked-sum walkers (compiled vs pure python).

Builds the exponent tables for a representative sub-Ohmic scenario once per
measurement count and times both backends on identical inputs.  Term counts
grow as 16^n, so the pure-python walker is capped at a lower n by default.

Run from the repository root:

    python3 benchmarks/bench_tracked.py [--n-max 6] [--py-max 5] [--repeats 3]
"""

import argparse
import time

import numpy as np

from dephasim import _tracked_cy, _tracked_py
from dephasim._tracked import TRACKED_BACKEND
from dephasim.bath import BathDescriptor, BathParams, CutoffForm, SpectralDensity
from dephasim.qubits import KernelCache, _backend_inputs, state_product_x


def _tables(n, tau=1.0, t_prime=0.5):
    sd = SpectralDensity(g=1.0, s=0.1, omega_c=2.0, cutoff=CutoffForm.EXPONENTIAL)
    bath = BathDescriptor.continuous(sd, BathParams(beta=100.0))
    cache = KernelCache(bath, tau, n, t_prime_grid=[t_prime])
    digit16, pairexp, qlin, q2damp, _, _ = _backend_inputs(
        state_product_x(), cache, n, t_prime, 1.0
    )
    return (
        np.ascontiguousarray(digit16),
        np.ascontiguousarray(pairexp),
        np.ascontiguousarray(qlin),
        q2damp,
    )


def _time(fn, args, repeats):
    best = np.inf
    value = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        value = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, value


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=6, help="largest n for the compiled walker")
    ap.add_argument("--py-max", type=int, default=5, help="largest n for the python walker")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    print(f"active package backend: {TRACKED_BACKEND}")
    print(f"{'n':>2} {'terms':>10} {'cython':>12} {'python':>12} {'speedup':>8}  agreement")
    for n in range(1, args.n_max + 1):
        tables = _tables(n)
        t_cy, v_cy = _time(_tracked_cy.tracked_sums, (n, *tables), args.repeats)
        if n <= args.py_max:
            t_py, v_py = _time(_tracked_py.tracked_sums, (n, *tables), args.repeats)
            scale = max(np.max(np.abs(v_cy)), 1e-300)
            dev = float(np.max(np.abs(v_cy - v_py)) / scale)
            print(
                f"{n:>2} {16**n:>10} {t_cy:>11.4f}s {t_py:>11.4f}s "
                f"{t_py / t_cy:>7.1f}x  {dev:.2e}"
            )
        else:
            print(f"{n:>2} {16**n:>10} {t_cy:>11.4f}s {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
