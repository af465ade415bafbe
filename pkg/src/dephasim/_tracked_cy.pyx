# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled inner loop for the tracked-environment correlation sums.

Walks the 16^n index assignments depth-first, carrying partial sums of the
per-digit and pair-coupling exponents, and accumulates the five charge
sectors with Neumaier-compensated summation.  Exponentiation happens once
per assignment with the full Q-sector exponent combined (including the
final-segment Q^2 damping), which keeps every magnitude <= 1 and makes the
walker overflow-proof in strong-damping regimes.  Semantics are identical
to the pure-Python walker in ``_tracked_py``.
"""

import numpy as np

from libc.math cimport cos, exp, sin, fabs

def tracked_sums(int n, double complex[::1] digit16,
                 double complex[:, :, ::1] pairexp,
                 double complex[:, ::1] qlin, double q2damp):
    out = np.zeros(5, dtype=np.complex128)
    cdef double complex[::1] out_v = out
    if n == 0:
        out[0] = exp(-16.0 * q2damp)
        out[1] = exp(-4.0 * q2damp)
        out[2] = 1.0
        out[3] = out[1]
        out[4] = out[0]
        return out
    if n > 8:
        raise ValueError(f"n={n} exceeds compiled walker capacity 8")

    cdef int dig[8]
    cdef double complex g[8][16]
    cdef double complex xpart[9]
    cdef double complex lpart[9]
    cdef double sums[10]
    cdef double comps[10]
    cdef double vals[10]
    cdef int depth, c, cc, p, i
    cdef double xr, xi, lr, li, q4, q16
    cdef double m0, mp2, mm2, mp4, mm4, c1, s1, c2l, s2l, c4l, s4l, x, t2, y
    cdef double complex xt, lt, acc

    q4 = 4.0 * q2damp
    q16 = 16.0 * q2damp
    for i in range(10):
        sums[i] = 0.0
        comps[i] = 0.0

    for c in range(16):
        g[0][c] = digit16[c]
    xpart[0] = 0.0
    lpart[0] = 0.0
    dig[0] = -1
    depth = 0

    with nogil:
        while depth >= 0:
            dig[depth] += 1
            if dig[depth] == 16:
                depth -= 1
                continue
            c = dig[depth]
            xt = xpart[depth] + g[depth][c]
            lt = lpart[depth] + qlin[depth, c]
            if depth == n - 1:
                xr = xt.real
                xi = xt.imag
                lr = lt.real
                li = lt.imag
                m0 = exp(xr)
                mp2 = exp(xr + 2.0 * lr - q4)
                mm2 = exp(xr - 2.0 * lr - q4)
                mp4 = exp(xr + 4.0 * lr - q16)
                mm4 = exp(xr - 4.0 * lr - q16)
                c1 = cos(xi)
                s1 = sin(xi)
                c2l = cos(2.0 * li)
                s2l = sin(2.0 * li)
                c4l = 2.0 * c2l * c2l - 1.0
                s4l = 2.0 * s2l * c2l
                # vals: re/im pairs for charge sectors Q = -4,-2,0,+2,+4
                vals[0] = mm4 * (c1 * c4l + s1 * s4l)
                vals[1] = mm4 * (s1 * c4l - c1 * s4l)
                vals[2] = mm2 * (c1 * c2l + s1 * s2l)
                vals[3] = mm2 * (s1 * c2l - c1 * s2l)
                vals[4] = m0 * c1
                vals[5] = m0 * s1
                vals[6] = mp2 * (c1 * c2l - s1 * s2l)
                vals[7] = mp2 * (s1 * c2l + c1 * s2l)
                vals[8] = mp4 * (c1 * c4l - s1 * s4l)
                vals[9] = mp4 * (s1 * c4l + c1 * s4l)
                for i in range(10):
                    x = vals[i]
                    t2 = sums[i] + x
                    if fabs(sums[i]) >= fabs(x):
                        y = (sums[i] - t2) + x
                    else:
                        y = (x - t2) + sums[i]
                    comps[i] += y
                    sums[i] = t2
            else:
                xpart[depth + 1] = xt
                lpart[depth + 1] = lt
                depth += 1
                for cc in range(16):
                    acc = digit16[cc]
                    for p in range(depth):
                        acc = acc + pairexp[depth - 1 - p, dig[p], cc]
                    g[depth][cc] = acc
                dig[depth] = -1

    for i in range(5):
        out_v[i] = (sums[2 * i] + comps[2 * i]) + 1j * (sums[2 * i + 1] + comps[2 * i + 1])
    return out
