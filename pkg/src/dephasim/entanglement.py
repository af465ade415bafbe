"""Wootters concurrence for two-qubit density matrices."""

from dataclasses import dataclass

import numpy as np

from .errors import DephasimError

__all__ = ["ConcurrenceResult", "spin_flip", "concurrence"]

_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SYSY = np.kron(_SY, _SY).real  # anti-diagonal (-1, 1, 1, -1), real


@dataclass(frozen=True)
class ConcurrenceResult:
    """value = max(0, l1 - l2 - l3 - l4) with lambdas sorted descending."""

    value: float
    lambdas: tuple


def spin_flip(rho):
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y).

    The complex conjugation is part of the standard spin-flip; without it
    phase-rotated Bell states would not be fixed points.
    """
    return _SYSY @ rho.conj() @ _SYSY


def concurrence(rho):
    """Concurrence of rho via the eigenvalues of rho * spin_flip(rho).

    The product is non-Hermitian but has nonnegative spectrum in exact
    arithmetic; tiny imaginary parts and negatives from round-off are
    clipped before the square root.  Equivalent to the eigenvalues of the
    Hermitian sqrt(sqrt(rho) rho~ sqrt(rho)).
    """
    rho = np.asarray(rho, dtype=complex)
    try:
        evals = np.linalg.eigvals(rho @ spin_flip(rho))
    except np.linalg.LinAlgError as exc:
        raise DephasimError(f"eigen-solver failed in concurrence: {exc}") from exc
    lam = np.sqrt(np.clip(evals.real, 0.0, None))
    lam = np.sort(lam)[::-1]
    value = max(0.0, lam[0] - lam[1] - lam[2] - lam[3])
    return ConcurrenceResult(value=float(value), lambdas=tuple(float(x) for x in lam))
