"""Concurrence units: known values, formulation equivalence, invariance."""

import numpy as np
import pytest
from scipy.linalg import sqrtm

from dephasim.entanglement import concurrence, spin_flip
from dephasim.qubits import state_bell, state_product_x

from conftest import random_pure_state


def random_density_matrix(rng, rank=4):
    """Random mixture of pure states (Hilbert-Schmidt-ish measure)."""
    a = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def concurrence_via_sqrtm(rho):
    """Independent formulation: eigenvalues of sqrt(sqrt(rho) rho~ sqrt(rho))."""
    root = sqrtm(rho)
    m = sqrtm(root @ spin_flip(rho) @ root)
    lams = np.sort(np.linalg.eigvalsh(0.5 * (m + m.conj().T)))[::-1]
    return max(0.0, lams[0] - lams[1] - lams[2] - lams[3])


def werner(p):
    bell = state_bell().projector()
    return p * bell + (1.0 - p) * np.eye(4) / 4.0


def test_bell_state_is_maximally_entangled():
    res = concurrence(state_bell().projector())
    assert abs(res.value - 1.0) <= 1e-12


def test_product_state_has_zero_concurrence():
    res = concurrence(state_product_x().projector())
    assert res.value <= 1e-12


def test_werner_known_value():
    # C(p) = max(0, (3p - 1)/2): 0.7 at p = 0.8, zero at p <= 1/3
    assert concurrence(werner(0.8)).value == pytest.approx(0.7, abs=1e-10)
    assert concurrence(werner(0.3)).value == 0.0
    assert concurrence(werner(1.0 / 3.0)).value == pytest.approx(0.0, abs=1e-10)


def test_lambdas_sorted_and_consistent(rng):
    res = concurrence(werner(0.9))
    lams = np.array(res.lambdas)
    assert lams.shape == (4,)
    assert np.all(np.diff(lams) <= 1e-15)
    assert res.value == pytest.approx(max(0.0, lams[0] - lams[1:].sum()), abs=1e-12)


def test_formulation_equivalence_on_random_states(rng):
    for _ in range(100):
        rho = random_density_matrix(rng)
        a = concurrence(rho).value
        b = concurrence_via_sqrtm(rho)
        assert a == pytest.approx(b, abs=1e-9)


def test_formulation_equivalence_low_rank(rng):
    # zero eigenvalues of rho * rho~ pick up O(eps) noise that the square
    # root amplifies to ~1e-8; both formulations stay within that
    for rank in (1, 2, 3):
        for _ in range(10):
            rho = random_density_matrix(rng, rank=rank)
            a = concurrence(rho).value
            b = concurrence_via_sqrtm(rho)
            assert a == pytest.approx(b, abs=3e-8)


def test_local_unitary_invariance(rng):
    def random_su2(rng):
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        norm = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
        a, b = a / norm, b / norm
        return np.array([[a, -np.conj(b)], [b, np.conj(a)]])

    for _ in range(25):
        rho = random_density_matrix(rng)
        u = np.kron(random_su2(rng), random_su2(rng))
        rotated = u @ rho @ u.conj().T
        assert concurrence(rotated).value == pytest.approx(
            concurrence(rho).value, abs=1e-10
        )


def test_spin_flip_fixes_bell_and_is_involutive(rng):
    bell = state_bell().projector()
    assert np.allclose(spin_flip(bell), bell, atol=1e-14)
    rho = random_density_matrix(rng)
    assert np.allclose(spin_flip(spin_flip(rho)), rho, atol=1e-14)


def test_pure_state_concurrence_formula(rng):
    # for a pure state, C = 2 |psi_1 psi_4 - psi_2 psi_3|; each of the three
    # zero lambdas carries up to sqrt(eps) ~ 1.5e-8 of eigen-noise
    for _ in range(50):
        psi = random_pure_state(rng)
        v = psi.vector
        want = 2.0 * abs(v[0] * v[3] - v[1] * v[2])
        got = concurrence(psi.projector()).value
        assert got == pytest.approx(want, abs=1e-7)
