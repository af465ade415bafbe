"""Brute-force ground truth: exact evolution of system + truncated bath.

Builds the full Hamiltonian for a small discrete-mode bath on a truncated
Fock space, evolves the joint density matrix by eigendecomposition (no use
of the analytic factorization being validated), applies projective
measurements with post-selection, and reduces to the system.  Everything
the analytic formulas claim is checked against this module.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import qubits as _qubits
from .entanglement import concurrence
from .errors import (
    ComplexityError,
    ConfigError,
    DephasimError,
    TruncationWarning,
    VanishingProbabilityError,
)

__all__ = [
    "TotalHamiltonian",
    "TotalState",
    "build_hamiltonian",
    "thermal_state",
    "initial_total_state",
    "evolve_exact",
    "project_system",
    "reduced_system",
    "oracle_trajectory",
    "OracleTrajectory",
    "ORACLE_CAP_MEASUREMENTS",
    "DIMENSION_CAP",
]

ORACLE_CAP_MEASUREMENTS = 3
DIMENSION_CAP = 4096

_SZ = np.diag([1.0, -1.0])
_I2 = np.eye(2)


@dataclass
class TotalHamiltonian:
    """H = H_S + H_E + H_I on system (x) modes, with its eigendecomposition."""

    matrix: np.ndarray
    dim_env: int
    n_modes: int
    n_max: int
    evals: np.ndarray = field(repr=False)
    evecs: np.ndarray = field(repr=False)


@dataclass
class TotalState:
    """Joint density matrix with the system factor first (dimension 4)."""

    rho: np.ndarray
    dim_env: int


def _lower(n_max):
    # annihilation operator on a Fock space truncated to n_max levels
    return np.diag(np.sqrt(np.arange(1.0, n_max)), k=1)


def _mode_op(op, r, n_modes, n_max):
    ops = [np.eye(n_max)] * n_modes
    ops[r] = op
    out = ops[0]
    for o in ops[1:]:
        out = np.kron(out, o)
    return out


def build_hamiltonian(sys, bath, dim_cap=DIMENSION_CAP):
    """Assemble and diagonalize the joint Hamiltonian.

    H_S = (omega_0/2)(sigma_z^(1) + sigma_z^(2)),  H_E = sum_r w_r b_r+ b_r,
    H_I = (sigma_z^(1) + sigma_z^(2)) sum_r (g_r b_r+ + g_r* b_r).
    """
    n_modes = bath.n_modes
    n_max = bath.n_max
    dim_env = n_max**n_modes
    dim = 4 * dim_env
    if dim > dim_cap:
        raise ComplexityError(
            f"total dimension {dim} exceeds the cap {dim_cap} "
            f"({n_modes} modes at n_max={n_max})"
        )
    sz_tot = np.kron(_SZ, _I2) + np.kron(_I2, _SZ)

    h_env = np.zeros((dim_env, dim_env))
    coupling = np.zeros((dim_env, dim_env), dtype=complex)
    for r in range(n_modes):
        b = _lower(n_max)
        h_env += bath.frequencies[r] * _mode_op(b.T @ b, r, n_modes, n_max)
        g = bath.couplings[r]
        coupling += g * _mode_op(b.T, r, n_modes, n_max) + np.conj(g) * _mode_op(
            b, r, n_modes, n_max
        )

    h = (
        0.5 * sys.omega_0 * np.kron(sz_tot, np.eye(dim_env))
        + np.kron(np.eye(4), h_env)
        + np.kron(sz_tot, coupling)
    )
    try:
        evals, evecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise DephasimError(f"Hamiltonian diagonalization failed: {exc}") from exc
    return TotalHamiltonian(
        matrix=h,
        dim_env=dim_env,
        n_modes=n_modes,
        n_max=n_max,
        evals=evals,
        evecs=evecs,
    )


def thermal_state(bath, bp):
    """Gibbs state of the truncated free bath; beta = inf gives the vacuum.

    Warns if any mode's untruncated thermal weight above the kept levels
    exceeds 1e-8.
    """
    rho = np.ones((1, 1))
    for r in range(bath.n_modes):
        w = bath.frequencies[r]
        if math.isinf(bp.beta):
            diag = np.zeros(bath.n_max)
            diag[0] = 1.0
        else:
            x = bp.beta * w
            tail = math.exp(-x * bath.n_max)
            if tail > 1e-8:
                warnings.warn(
                    f"mode {r}: truncated thermal tail {tail:.2e} exceeds 1e-8 "
                    f"(n_max={bath.n_max}, beta*w={x:.3g})",
                    TruncationWarning,
                )
            diag = np.exp(-x * np.arange(bath.n_max))
            diag /= diag.sum()
        rho = np.kron(rho, np.diag(diag))
    return rho


def initial_total_state(psi, env_rho):
    """|psi><psi| (x) env_rho."""
    return TotalState(rho=np.kron(psi.projector(), env_rho), dim_env=env_rho.shape[0])


def evolve_exact(state, h, t):
    """exp(-iHt) rho exp(+iHt) via the stored eigendecomposition."""
    if t < 0.0:
        raise ConfigError(f"time must be >= 0, got {t}")
    u = (h.evecs * np.exp(-1j * h.evals * t)) @ h.evecs.conj().T
    return TotalState(rho=u @ state.rho @ u.conj().T, dim_env=state.dim_env)


def project_system(state, psi):
    """Apply (P_psi (x) 1), renormalize; returns (state, outcome probability)."""
    d_env = state.dim_env
    resh = state.rho.reshape(4, d_env, 4, d_env)
    p_psi = psi.projector()
    projected = np.einsum("ik,kalb,lj->iajb", p_psi, resh, p_psi).reshape(
        4 * d_env, 4 * d_env
    )
    p = float(np.trace(projected).real)
    if p < 1e-14:
        raise VanishingProbabilityError(f"measurement outcome probability {p:.3e}")
    return TotalState(rho=projected / p, dim_env=d_env), p


def reduced_system(state):
    """Partial trace over all modes."""
    d_env = state.dim_env
    return np.einsum("iaja->ij", state.rho.reshape(4, d_env, 4, d_env))

@dataclass
class OracleTrajectory:
    """Exact time series: reduced states, concurrences, outcome probabilities."""

    t: np.ndarray
    segment: np.ndarray
    rho: np.ndarray            # (T, 4, 4)
    concurrence: np.ndarray    # (T,)
    probabilities: list        # one per completed measurement


def oracle_trajectory(psi, sys, bath, bp, sched, reset_env=False):
    """Exact trajectory on the standard output grid.

    Evolves the joint state segment by segment, measuring (and post-selecting
    on psi) at every multiple of tau.  With reset_env=True the environment is
    replaced by the fresh thermal state after each measurement, emulating the
    reset idealization; otherwise the environment keeps its post-measurement
    correlations (tracked).
    """
    t_grid, seg_grid, tp_grid = _qubits.segment_grid(sched.tau, sched.t_max, sched.dt)
    n_segments_done = int(seg_grid.max())
    if n_segments_done > ORACLE_CAP_MEASUREMENTS:
        raise ComplexityError(
            f"oracle capped at {ORACLE_CAP_MEASUREMENTS} measurements, "
            f"grid needs {n_segments_done}"
        )
    h = build_hamiltonian(sys, bath)
    env0 = thermal_state(bath, bp)
    state = initial_total_state(psi, env0)

    v = h.evecs
    d_env = h.dim_env
    # x[k] with k = 4*i + j holds sum_e V[(i,e),a] * conj(V[(j,e),b]) so a
    # reduced matrix element is a phase-weighted contraction against it
    v_blocks = v.reshape(4, d_env, -1)
    x_tab = np.empty((16, v.shape[1], v.shape[1]), dtype=complex)
    for i in range(4):
        for j in range(4):
            x_tab[4 * i + j] = v_blocks[i].T @ v_blocks[j].conj()

    rhos = np.empty((len(t_grid), 4, 4), dtype=complex)
    probabilities = []
    for n_seg in range(n_segments_done + 1):
        mask = seg_grid == n_seg
        if mask.any():
            w_mat = v.conj().T @ state.rho @ v
            c_tab = x_tab * w_mat[None, :, :]
            tps = tp_grid[mask]
            phases = np.exp(-1j * np.outer(tps, h.evals))  # (T', D)
            vals = np.empty((len(tps), 16), dtype=complex)
            for k in range(16):
                vals[:, k] = np.einsum("tb,tb->t", phases @ c_tab[k], phases.conj())
            rhos[mask] = vals.reshape(len(tps), 4, 4)
        if n_seg < n_segments_done:
            state = evolve_exact(state, h, sched.tau)
            state, p = project_system(state, psi)
            probabilities.append(p)
            if reset_env:
                state = initial_total_state(psi, env0)

    conc = np.array([concurrence(r).value for r in rhos])
    return OracleTrajectory(
        t=t_grid,
        segment=seg_grid,
        rho=rhos,
        concurrence=conc,
        probabilities=probabilities,
    )
