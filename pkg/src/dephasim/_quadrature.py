"""Adaptive quadrature for integrals of the form  I = int_0^U  w^(s-1) f(w) dw.

Every bath kernel in this package reduces to that shape: the power-law factor
w^(s-1) carries the (integrable) endpoint singularity for s < 1, and f is
smooth but may oscillate on a known scale and decay on a known scale.  The
strategy is

  * a Gauss-Jacobi rule with weight w^(s-1) on a head interval [0, a0] chosen
    small enough that f is non-oscillatory and analytic there, and
  * composite Gauss-Legendre panels on [a0, U], growing geometrically from a0
    but never wider than half an oscillation period,

refined by doubling the rule orders until two successive levels agree.
Batches of integrands are evaluated in one call (f maps a node vector of
length M to an array (..., M)) so the caller can amortize node construction
over a whole time grid.
"""

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .errors import QuadratureError

__all__ = ["power_law_integral"]

_LEVELS = ((24, 12), (48, 24), (96, 48), (192, 96))


@lru_cache(maxsize=64)
def _head_rule(order, s, a0):
    # weight (1+x)^(s-1) on [-1,1] maps to w^(s-1) on [0,a0]
    x, w = roots_jacobi(order, 0.0, s - 1.0)
    nodes = 0.5 * a0 * (1.0 + x)
    weights = (0.5 * a0) ** s * w
    return nodes, weights


@lru_cache(maxsize=64)
def _panel_edges(a0, upper, cap):
    edges = [a0]
    width = a0
    while edges[-1] < upper:
        width = min(2.0 * width, cap)
        edges.append(min(edges[-1] + width, upper))
    return tuple(edges)


@lru_cache(maxsize=64)
def _tail_rule(order, s, a0, upper, cap):
    x, w = roots_legendre(order)
    edges = np.asarray(_panel_edges(a0, upper, cap))
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    # fold the power-law factor into the weights; nodes are all > 0 here
    weights = weights * nodes ** (s - 1.0)
    return nodes, weights


def _nodes_and_weights(level, s, a0, upper, cap):
    head_order, tail_order = _LEVELS[level]
    hn, hw = _head_rule(head_order, s, a0)
    if upper > a0:
        tn, tw = _tail_rule(tail_order, s, a0, upper, cap)
        return np.concatenate([hn, tn]), np.concatenate([hw, tw])
    return hn, hw


def power_law_integral(
    f,
    s,
    upper,
    *,
    osc_scale=0.0,
    decay_scale=None,
    beta=None,
    atol=1e-10,
    rtol=1e-8,
):
    """Integrate w^(s-1) f(w) over (0, upper] for a batch of integrands.

    Parameters
    ----------
    f : callable
        Maps a node vector (M,) to an array (..., M) of smooth integrand
        values (the power-law factor must NOT be included).
    s : float
        Power-law exponent, s > 0.
    upper : float
        Upper integration limit.
    osc_scale : float
        Largest angular frequency of oscillation present in f, or 0 if f
        does not oscillate.  Panels are kept below half a period.
    decay_scale : float or None
        Exponential decay scale of f, if any; bounds the head interval.
    beta : float or None
        Inverse-temperature scale present in f via coth(beta w / 2); the
        head interval is kept inside its analyticity disk.

    Returns
    -------
    ndarray with f's batch shape (the node axis integrated out).

    Raises
    ------
    QuadratureError
        If refinement stalls or the integrand evaluates non-finite.
    """
    if s <= 0.0:
        raise ValueError(f"power-law exponent must be positive, got {s}")
    if upper <= 0.0:
        raise ValueError(f"upper limit must be positive, got {upper}")

    cap = np.inf
    if osc_scale > 0.0:
        cap = np.pi / osc_scale  # at most half a period per panel
    if decay_scale is not None:
        cap = min(cap, 4.0 * decay_scale)
    cap = min(cap, 0.125 * upper)  # at least ~8 tail panels
    head = min(upper, 0.5 * cap)
    if beta is not None and np.isfinite(beta) and beta > 0.0:
        head = min(head, 2.0 / beta)  # stay inside coth's analyticity disk

    previous = None
    for level in range(len(_LEVELS)):
        nodes, weights = _nodes_and_weights(level, s, head, upper, cap)
        values = np.asarray(f(nodes))
        if not np.all(np.isfinite(values)):
            bad = nodes[~np.isfinite(values).all(axis=tuple(range(values.ndim - 1)))]
            raise QuadratureError(
                f"integrand not finite near w={bad.flat[0]:.6g}",
                interval=(float(bad.min()), float(bad.max())),
            )
        current = values @ weights
        if previous is not None:
            err = np.abs(current - previous)
            tol = np.maximum(atol, rtol * np.abs(current))
            if np.all(err <= tol):
                return current
        previous = current

    raise QuadratureError(
        f"no convergence on (0, {upper:g}) after {len(_LEVELS)} refinements "
        f"(last change {float(np.max(err)):.3g})",
        interval=(0.0, upper),
    )
