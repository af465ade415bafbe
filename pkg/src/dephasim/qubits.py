"""Two-qubit states and their dephasing dynamics under repeated measurements.

Basis convention: sigma_z product eigenstates |k, l> with k, l = +/-1 mapped
to rows (+1,+1) -> 0, (+1,-1) -> 1, (-1,+1) -> 2, (-1,-1) -> 3 (so k = +1 is
the upper level and the ordering agrees with numpy's kron).

Two evolutions are provided for a system prepared in |psi>, measured
projectively (and post-selected on |psi>) every tau:

* ``evolve_reset``: the environment is replaced by a fresh thermal state
  after every measurement, so each segment restarts the single-interval
  closed form with t' = t - (N-1) tau.

* ``evolve_tracked``: the environment keeps the imprint of every earlier
  measurement.  The density matrix becomes a sum over 16^(N-1) assignments
  of primed/unprimed basis pairs, one per completed measurement, weighted by
  projection probabilities and bath kernels, normalized by the outcome
  probability Z.

The tracked sum is evaluated by a compiled core when available; see
``_tracked``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import bath as _bath
from ._tracked import tracked_sums
from .errors import (
    ComplexityError,
    ConfigError,
    DephasimError,
    VanishingProbabilityError,
)

__all__ = [
    "BASIS",
    "basis_index",
    "TwoQubitPureState",
    "SystemParams",
    "MeasurementSchedule",
    "state_product_x",
    "state_bell",
    "KernelCache",
    "evolve_reset",
    "evolve_tracked",
    "normalization_z",
    "enumerate_index_terms",
    "segment_split",
    "segment_grid",
    "density_matrix_diagnostics",
    "HARD_CAP_MEASUREMENTS",
]

HARD_CAP_MEASUREMENTS = 6  # 16^6 ~ 1.7e7 terms; refuse anything larger

BASIS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
_K = np.array([1, 1, -1, -1], dtype=float)
_L = np.array([1, -1, 1, -1], dtype=float)
_SUM = _K + _L          # k + l per basis row: 2, 0, 0, -2
_PROD = _K * _L         # k * l per basis row: 1, -1, -1, 1

# Q[row', row] = (k + l) - (k' + l'): column sum minus row sum
_Q = _SUM[None, :] - _SUM[:, None]


def basis_index(k, l):
    """Row index of |k, l>."""
    if k not in (1, -1) or l not in (1, -1):
        raise ConfigError(f"basis labels must be +/-1, got ({k}, {l})")
    return (1 - k) + (1 - l) // 2


@dataclass(frozen=True)
class TwoQubitPureState:
    """Pure state sum_kl psi_kl |k, l>; amplitudes in basis-row order."""

    amplitudes: tuple

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (4,):
            raise ConfigError("a two-qubit pure state needs exactly 4 amplitudes")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ConfigError(f"state norm deviates from 1 by {abs(norm - 1.0):.3e}")
        object.__setattr__(self, "amplitudes", tuple(complex(a) for a in amps))

    @property
    def vector(self):
        return np.array(self.amplitudes, dtype=complex)

    def projector(self):
        v = self.vector
        return np.outer(v, v.conj())

    @classmethod
    def normalized(cls, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex)
        norm = math.sqrt(float(np.sum(np.abs(amps) ** 2)))
        if norm == 0.0:
            raise ConfigError("cannot normalize the zero vector")
        return cls(tuple(amps / norm))


def state_product_x():
    """|1>_X |1>_X: every sigma_z amplitude equal to 1/2 (product state)."""
    return TwoQubitPureState((0.5, 0.5, 0.5, 0.5))


def state_bell():
    """(|+1,+1> + |-1,-1>)/sqrt(2), maximally entangled."""
    r = 1.0 / math.sqrt(2.0)
    return TwoQubitPureState((r, 0.0, 0.0, r))


@dataclass(frozen=True)
class SystemParams:
    """Free-qubit parameters; omega_0 is the level splitting of each qubit."""

    omega_0: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.omega_0):
            raise ConfigError("omega_0 must be finite")


@dataclass(frozen=True)
class MeasurementSchedule:
    """Equally spaced projective measurements at tau, 2 tau, ...

    n_measurements counts completed measurements (N - 1) and doubles as the
    cost cap for the tracked sum.
    """

    tau: float
    n_measurements: int
    t_max: float
    dt: float

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ConfigError(f"tau must be > 0, got {self.tau}")
        if not self.dt > 0.0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if not self.t_max >= self.dt:
            raise ConfigError(f"t_max must be >= dt, got {self.t_max}")
        if self.n_measurements < 0:
            raise ConfigError("n_measurements must be >= 0")
        if self.n_measurements > HARD_CAP_MEASUREMENTS:
            raise ComplexityError(
                f"n_measurements={self.n_measurements} exceeds the hard cap of "
                f"{HARD_CAP_MEASUREMENTS} (16^n terms in the tracked sum)"
            )


def segment_split(t, tau):
    """Decompose t >= 0 into (completed measurements n, elapsed t' in segment).

    fmod is exact in IEEE arithmetic, so t' carries no remainder error of its
    own; when n * tau is exactly representable (dyadic tau) measurement
    instants land on t' = 0 exactly.  Grids from segment_grid place the
    instants at t' = 0 by construction for any tau.
    """
    if t < 0.0:
        raise ConfigError(f"time must be >= 0, got {t}")
    tp = math.fmod(t, tau)
    n = int(round((t - tp) / tau))
    return n, tp


def segment_grid(tau, t_max, dt):
    """Output grid 0 .. t_max step dt, tagged with segment indices.

    Returns (t, segment, t_prime) arrays.  When dt divides tau the grid is
    built segment-aligned from integer indices, so measurement instants hit
    t' = 0 exactly and every segment reuses the identical t' ladder.
    """
    if not (tau > 0.0 and dt > 0.0 and t_max >= dt):
        raise ConfigError("need tau > 0, dt > 0, t_max >= dt")
    per_seg = int(round(tau / dt))
    n_points = int(math.floor(t_max / dt + 1e-9)) + 1
    aligned = per_seg >= 1 and abs(per_seg * dt - tau) <= 1e-9 * tau
    j = np.arange(n_points)
    if aligned:
        seg = j // per_seg
        tp = (j % per_seg) * dt
        t = seg * tau + tp
    else:
        t = j * dt
        tp = np.array([math.fmod(v, tau) for v in t])
        seg = np.round((t - tp) / tau).astype(int)
    return t.astype(float), seg.astype(int), tp.astype(float)

# Calibration of the multi-measurement phase/damping factors.  Each completed
# measurement p contributes a primed/unprimed basis pair with
#   d_p  = (m'+n') - (m+n)   in {0, +/-2, +/-4}
#   s_p  = (m+n) + (m'+n')
#   pr_p = m n - m' n'
# and the per-assignment weight is
#   prod_p |psi_mn|^2 |psi_m'n'|^2
#   * exp(i*C_DTAU*Delta(tau)*pr_p + i*C_W0*omega_0*tau*d_p
#         - C_GTAU*gamma(tau)*d_p^2)
#   * prod_{p<q} exp(C_GPAIR*gamma_lag(q-p)*d_p*d_q + i*C_MU*mu_lag(q-p)*s_p*d_q)
#   * exp(Q*sum_p(C_EPS*d_p*eps_p + i*C_SIG*s_p*sig_p))
# The C_W0 term is the free-precession phase each branch accumulates over its
# measurement interval; it survives post-selection because the projection
# only collapses the system factor, not the phase already attached to the
# branch amplitude.  It cancels pair-by-pair when omega_0 = 0 or when the
# prepared state occupies a single total-spin sector, which is why it is
# easy to lose: a derivation checked only at omega_0 = 0 never notices.
# The coefficients below are pinned by the exact-diagonalization cross-check
# (see the oracle module tests); they follow from collecting displacement
# commutators per segment and taking the Gaussian thermal average.
#
# The tables handed to the backends stay in the log domain: each factor is
# stored as its exponent and the walker exponentiates once per assignment
# with the final-segment Q^2 damping folded in.  The combined real exponent
# is -1/4 times a Gaussian variance (PSD quadratic form in the d_p and Q),
# so magnitudes never exceed the basis weight and strong-damping regimes
# underflow to zero instead of overflowing.
_C_DTAU = 0.5
_C_W0 = -0.5
_C_GTAU = 0.25
_C_GPAIR = -0.5
_C_MU = 0.5
_C_EPS = 0.25
_C_SIG = 0.5


class KernelCache:
    """Write-once bundle of every bath kernel the tracked sum re-reads.

    Lag-indexed tables (mu, gamma_pair for lags 1..n-1; eps, sig for lags
    1..n) plus gamma/Delta at tau and, for each t' on the supplied grid,
    gamma(t'), Delta(t') and the eps/sig vectors.  Off-grid t' values are
    computed on demand without mutating the cache.
    """

    def __init__(self, bath, tau, n_measurements, t_prime_grid=None):
        if n_measurements > HARD_CAP_MEASUREMENTS:
            raise ComplexityError(
                f"n_measurements={n_measurements} exceeds the hard cap of "
                f"{HARD_CAP_MEASUREMENTS}"
            )
        if n_measurements < 0:
            raise ConfigError("n_measurements must be >= 0")
        self.bath = bath
        self.tau = float(tau)
        self.n_measurements = int(n_measurements)
        n = self.n_measurements
        self.gamma_tau = _bath.gamma_t(bath, self.tau)
        self.delta_tau = _bath.delta_t(bath, self.tau)
        # mu_lag[L], gamma_lag[L] for pair separation L = q - p >= 1
        self.mu_lag = np.zeros(max(n, 1))
        self.gamma_lag = np.zeros(max(n, 1))
        for lag in range(1, n):
            self.mu_lag[lag] = _bath.mu_pair(bath, 1 + lag, 1, self.tau)
            self.gamma_lag[lag] = _bath.gamma_pair(bath, 1 + lag, 1, self.tau)
        self._grid = {}
        if t_prime_grid is not None and len(t_prime_grid) > 0:
            tp = np.asarray(t_prime_grid, dtype=float)
            gam = np.atleast_1d(_bath.gamma_t(bath, tp))
            dlt = np.atleast_1d(_bath.delta_t(bath, tp))
            eps = np.zeros((n + 1, len(tp)))
            sig = np.zeros((n + 1, len(tp)))
            for lag in range(1, n + 1):
                eps[lag] = _bath.epsilon_pn(bath, 1, 1 + lag, tp, self.tau)
                sig[lag] = _bath.sigma_pn(bath, 1, 1 + lag, tp, self.tau)
            for i, v in enumerate(tp):
                self._grid[float(v)] = (
                    float(gam[i]),
                    float(dlt[i]),
                    eps[:, i].copy(),
                    sig[:, i].copy(),
                )

    def at(self, t_prime):
        """(gamma(t'), Delta(t'), eps_by_lag, sig_by_lag) for one t'."""
        hit = self._grid.get(float(t_prime))
        if hit is not None:
            return hit
        n = self.n_measurements
        gam = _bath.gamma_t(self.bath, t_prime)
        dlt = _bath.delta_t(self.bath, t_prime)
        eps = np.zeros(n + 1)
        sig = np.zeros(n + 1)
        if t_prime > 0.0:
            for lag in range(1, n + 1):
                eps[lag] = _bath.epsilon_pn(self.bath, 1, 1 + lag, t_prime, self.tau)
                sig[lag] = _bath.sigma_pn(self.bath, 1, 1 + lag, t_prime, self.tau)
        return gam, dlt, eps, sig


def enumerate_index_terms(n_measurements):
    """Yield all 16^n assignments of ((m,n), (m',n')) per completed measurement.

    Deterministic order: assignment number i in 0..16^n-1 is read as n
    base-16 digits, most significant digit = measurement 1; each digit is
    4 * (unprimed basis row) + (primed basis row) with rows ordered as BASIS.
    n = 0 yields a single empty assignment.
    """
    if n_measurements > HARD_CAP_MEASUREMENTS:
        raise ComplexityError(
            f"n_measurements={n_measurements} exceeds the hard cap of "
            f"{HARD_CAP_MEASUREMENTS}"
        )
    if n_measurements < 0:
        raise ConfigError("n_measurements must be >= 0")
    for digits in np.ndindex(*([16] * n_measurements)):
        yield tuple((BASIS[c // 4], BASIS[c % 4]) for c in digits)


def _backend_inputs(psi, cache, n, t_prime, omega_0):
    """Per-digit exponent tables for the tracked-sum backend at one (n, t')."""
    w = np.abs(psi.vector) ** 2
    w16 = np.repeat(w, 4) * np.tile(w, 4)          # |psi_u|^2 |psi_v|^2
    u = np.repeat(np.arange(4), 4)
    v = np.tile(np.arange(4), 4)
    d16 = _SUM[v] - _SUM[u]
    s16 = _SUM[u] + _SUM[v]
    pr16 = _PROD[u] - _PROD[v]

    with np.errstate(divide="ignore"):
        lw16 = np.log(w16)                         # -inf on zero-weight digits
    digit16 = (
        lw16 - _C_GTAU * cache.gamma_tau * d16**2
        + 1j * (_C_DTAU * cache.delta_tau * pr16 + _C_W0 * omega_0 * cache.tau * d16)
    )

    n_lags = max(n - 1, 0)
    pairexp = np.empty((n_lags, 16, 16), dtype=complex)
    for lag in range(1, n):
        pairexp[lag - 1] = (
            _C_GPAIR * cache.gamma_lag[lag] * np.outer(d16, d16)
            + 1j * _C_MU * cache.mu_lag[lag] * np.outer(s16, d16)
        )

    gam, dlt, eps_by_lag, sig_by_lag = cache.at(t_prime)
    qlin = np.zeros((n, 16), dtype=complex)
    for p in range(1, n + 1):
        lag = n + 1 - p
        qlin[p - 1] = _C_EPS * d16 * eps_by_lag[lag] + 1j * (
            _C_SIG * s16 * sig_by_lag[lag]
        )
    q2damp = _C_GTAU * gam
    return digit16, pairexp, qlin, q2damp, gam, dlt


def _tracked_s(psi, cache, n, t_prime, omega_0):
    """S(Q)*exp(-gamma(t')*Q^2/4) for Q = -4,-2,0,2,4 plus gamma, Delta."""
    digit16, pairexp, qlin, q2damp, gam, dlt = _backend_inputs(
        psi, cache, n, t_prime, omega_0
    )
    s = tracked_sums(n, digit16, pairexp, qlin, q2damp)
    return s, gam, dlt


def _assemble(psi, omega_0, gam, dlt, t_prime, s_by_q, z):
    """Common density-matrix assembly for both evolutions.

    s_by_q holds the per-sector sums resolved via the Q lookup.  The reset
    case passes ones, z = 1 and the segment damping gamma(t'); the tracked
    case passes gam = 0 because its sums already carry exp(-gamma*Q^2/4).
    """
    v = psi.vector
    outer = np.outer(v, v.conj())
    phase = np.exp(
        0.5j * omega_0 * _Q * t_prime
        + 0.5j * dlt * (_PROD[None, :] - _PROD[:, None])
        - 0.25 * gam * _Q**2
    )
    qidx = ((_Q + 4.0) / 2.0).astype(int)
    return outer * phase * s_by_q[qidx] / z

def reset_matrix(psi, sys, bath, t_prime, gam=None, dlt=None):
    """Single-segment closed form at elapsed time t' (environment fresh).

    gam/dlt accept precomputed gamma(t'), Delta(t') so grid evaluations can
    reuse a kernel cache instead of re-integrating per point.
    """
    if gam is None:
        gam = _bath.gamma_t(bath, t_prime)
    if dlt is None:
        dlt = _bath.delta_t(bath, t_prime)
    ones = np.ones(5)
    return _assemble(psi, sys.omega_0, gam, dlt, t_prime, ones, 1.0)


def evolve_reset(psi, sys, bath, sched, t):
    """Density matrix at time t with the environment reset at each measurement.

    With N-1 = floor(t/tau) completed measurements and t' = t - (N-1) tau:

        rho_{k'l',kl} = psi_{k'l'} psi*_{kl}
                        * exp(-i (omega_0/2) (k'+l'-k-l) t')
                        * exp(-i (Delta(t')/2) (k'l' - kl))
                        * exp(-(1/4) (k+l-k'-l')^2 gamma(t'))

    i.e. the single-interval form restarted from |psi><psi| every tau.
    """
    _check_time(t, sched)
    _, t_prime = segment_split(t, sched.tau)
    return reset_matrix(psi, sys, bath, t_prime)


def tracked_matrix(psi, sys, cache, n, t_prime):
    """Tracked-environment density matrix at (completed measurements n, t')."""
    if n > cache.n_measurements:
        raise ComplexityError(
            f"segment {n + 1} requested but cache was built for "
            f"{cache.n_measurements} completed measurements"
        )
    if t_prime == 0.0:
        # every S(Q) equals Z when no time has elapsed in the segment
        return psi.projector()
    s, _, dlt = _tracked_s(psi, cache, n, t_prime, sys.omega_0)
    z = _z_from_sums(s)
    # segment damping is already folded into s, so no gamma term here
    return _assemble(psi, sys.omega_0, 0.0, dlt, t_prime, s, z)


def evolve_tracked(psi, sys, bath, sched, cache, t):
    """Density matrix at time t with the environment state carried through
    every measurement (the full multi-index sum over completed-measurement
    basis pairs, normalized by the outcome probability Z)."""
    _check_time(t, sched)
    n, t_prime = segment_split(t, sched.tau)
    if n > sched.n_measurements:
        raise ComplexityError(
            f"t={t} implies {n} completed measurements, schedule allows "
            f"{sched.n_measurements}"
        )
    return tracked_matrix(psi, sys, cache, n, t_prime)


def normalization_z(psi, bath, sched, cache, omega_0=0.0):
    """Probability that all n_measurements post-selections succeed.

    Equal to the Q = 0 tracked sum, which carries no t' dependence; real in
    (0, 1] up to a conjugate-pair-symmetry residue checked here.  omega_0
    matters: free precession rotates the state between measurements, so the
    post-selection probability depends on it unless psi occupies a single
    total-spin sector.
    """
    n = sched.n_measurements if sched is not None else cache.n_measurements
    digit16, pairexp, qlin, q2damp, _, _ = _backend_inputs(psi, cache, n, 0.0, omega_0)
    s = tracked_sums(n, digit16, pairexp, qlin, q2damp)
    return _z_from_sums(s)


def _z_from_sums(s):
    z = s[2]
    if abs(z.imag) > 1e-12:
        raise DephasimError(
            f"normalization has imaginary residue {z.imag:.3e} "
            "(conjugate-pair symmetry violated)"
        )
    if z.real < 1e-14:
        raise VanishingProbabilityError(
            f"outcome probability {z.real:.3e} below 1e-14"
        )
    return z.real


def _check_time(t, sched):
    # slack absorbs accumulated grid roundoff at the endpoint
    slack = 1e-9 * max(1.0, abs(sched.t_max))
    if not -slack <= t <= sched.t_max + slack:
        raise ConfigError(f"t={t} outside [0, t_max={sched.t_max}]")


def density_matrix_diagnostics(rho):
    """(hermiticity defect, trace defect, min eigenvalue) of a 4x4 matrix."""
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    tr = abs(complex(np.trace(rho)) - 1.0)
    eigs = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return herm, float(tr), float(eigs.min())
