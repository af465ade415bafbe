"""Pure-python (numpy) evaluation of the tracked-environment index sums.

Reference implementation and fallback for the compiled core.  Enumerates the
16^n assignments in the documented order in fixed-size chunks; chunk partial
sums use numpy's pairwise summation and are combined with math.fsum, so the
result is deterministic and effectively exactly rounded.

Tables arrive as exponents (log domain) and each assignment is exponentiated
once with the full Q-sector exponent combined, including the final-segment
Q^2 damping.  The total exponent of any assignment is a negated positive
semidefinite quadratic form in the displacement digits and Q (it is a
Gaussian variance), so every magnitude is <= 1 and the sum cannot overflow
even in strong-coupling / high-temperature regimes where individual kernel
values reach the hundreds.
"""

import math

import numpy as np

__all__ = ["tracked_sums"]

_CHUNK = 1 << 16
_QVALS = (-4.0, -2.0, 0.0, 2.0, 4.0)


def tracked_sums(n, digit16, pairexp, qlin, q2damp):
    """Accumulate S(Q)*exp(-q2damp*Q^2) for Q = -4, -2, 0, 2, 4.

    Per assignment (digits c_1..c_n, big-endian) the combined exponent is
      X = sum_p digit16[c_p] + sum_{p<q} pairexp[q-p-1][c_p, c_q]
      L = sum_p qlin[p][c_p]
    and slot Q accumulates exp(X + Q*L - q2damp*Q^2), real part of the
    exponent giving the magnitude, imaginary part the phase.  digit16 real
    parts may be -inf (zero-weight digits).
    """
    if n > 8:
        raise ValueError(f"n={n} exceeds walker capacity 8")
    if n == 0:
        return np.exp(-q2damp * np.array([16.0, 4.0, 0.0, 4.0, 16.0])) + 0.0j
    digit16 = np.asarray(digit16, dtype=complex)
    total = 16**n
    shifts = [4 * (n - 1 - p) for p in range(n)]
    parts = [[] for _ in range(10)]  # re/im per Q slot
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64)
        digs = [(idx >> sh) & 15 for sh in shifts]
        x = digit16[digs[0]].copy()
        lin = qlin[0][digs[0]].astype(complex)
        for q in range(1, n):
            dq = digs[q]
            x += digit16[dq]
            lin += qlin[q][dq]
            for p in range(q):
                x += pairexp[q - p - 1][digs[p], dq]
        for slot, qv in enumerate(_QVALS):
            mag = np.exp(x.real + qv * lin.real - q2damp * qv * qv)
            ph = x.imag + qv * lin.imag
            tot_re = float(np.sum(mag * np.cos(ph)))
            tot_im = float(np.sum(mag * np.sin(ph)))
            parts[2 * slot].append(tot_re)
            parts[2 * slot + 1].append(tot_im)
    return np.array(
        [math.fsum(parts[2 * i]) + 1j * math.fsum(parts[2 * i + 1]) for i in range(5)]
    )
