"""Bosonic dephasing-bath descriptions and their influence kernels.

A bath is either a continuum characterized by a power-law spectral density

    J(w) = G * w**s * w_c**(1-s) * cutoff(w / w_c),

with Ohmicity parameter s (s < 1 sub-Ohmic, s = 1 Ohmic, s > 1 super-Ohmic),
or an explicit finite collection of modes (g_r, w_r).  Both variants feed the
same kernel formulas; a sum over modes weighted by |g_r|^2 and an integral
over J(w) are interchangeable everywhere.

The kernels, written for a mode of frequency w at inverse temperature beta
(thermal kernels carry coth(beta*w/2), the rest are temperature independent):

    gamma(t)          (4/w^2) * (1 - cos(w t)) * coth(beta w / 2)
    delta(t)          (4/w^2) * (sin(w t) - w t)
    mu_pp'(tau)       (4/w^2) * sin((p-p') w tau) * (1 - cos(w tau))
    gamma_pp'(tau)    (4/w^2) * (1 - cos(w tau)) * cos((p-p') w tau)
    eps_pN(t', tau)   (4/w^2) * coth(beta w/2) * 4 sin(w t'/2) sin(w tau/2) cos(w theta/2)
    sig_pN(t', tau)   (4/w^2) * 2 sin(w t'/2) sin(w tau/2) sin(w theta/2)

with theta = (2(p - N) + 1) tau - t'.  The eps/sig forms are the factored
versions of four-term cosine/sine differences; factoring removes the small-w
cancellation and makes the t' = 0 zero exact in floating point.

gamma is non-negative and non-decreasing structure aside; delta(t) <= 0 for
t >= 0; mu and gamma_pp' depend on p, p' only through the lag p - p', and
eps/sig only through p - N.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._quadrature import power_law_integral
from .errors import ConfigError

__all__ = [
    "CutoffForm",
    "SpectralDensity",
    "BathParams",
    "DiscreteBath",
    "BathDescriptor",
    "gamma_t",
    "delta_t",
    "mu_pair",
    "gamma_pair",
    "epsilon_pn",
    "sigma_pn",
    "discretize_spectral_density",
]


class CutoffForm(enum.Enum):
    """High-frequency regularization of the power-law spectral density."""

    EXPONENTIAL = "exponential"  # J ~ w^s exp(-w/w_c)
    HARD = "hard"                # J ~ w^s for w <= w_c, zero above


@dataclass(frozen=True)
class SpectralDensity:
    """Power-law spectral density J(w) = g * w**s * omega_c**(1-s) * cutoff."""

    g: float
    s: float
    omega_c: float
    cutoff: CutoffForm = CutoffForm.EXPONENTIAL

    def __post_init__(self):
        if not self.g >= 0.0:
            raise ConfigError(f"coupling strength g must be >= 0, got {self.g}")
        if not self.s > 0.0:
            raise ConfigError(f"Ohmicity s must be > 0, got {self.s}")
        if not self.omega_c > 0.0:
            raise ConfigError(f"cutoff frequency must be > 0, got {self.omega_c}")
        if not isinstance(self.cutoff, CutoffForm):
            object.__setattr__(self, "cutoff", CutoffForm(self.cutoff))

    def j(self, omega):
        """Evaluate J at omega (scalar or array); zero for omega <= 0."""
        w = np.asarray(omega, dtype=float)
        out = np.zeros_like(w)
        pos = w > 0.0
        base = self.g * w[pos] ** self.s * self.omega_c ** (1.0 - self.s)
        if self.cutoff is CutoffForm.EXPONENTIAL:
            out[pos] = base * np.exp(-w[pos] / self.omega_c)
        else:
            out[pos] = base * (w[pos] <= self.omega_c)
        return out if out.ndim else float(out)

    @property
    def support_upper(self):
        """Frequency above which J is zero or negligible (< 1e-26 relative)."""
        if self.cutoff is CutoffForm.HARD:
            return self.omega_c
        return 60.0 * self.omega_c


@dataclass(frozen=True)
class BathParams:
    """Thermodynamic state of the bath; beta = math.inf means zero temperature."""

    beta: float = math.inf

    def __post_init__(self):
        if not self.beta > 0.0:
            raise ConfigError(f"inverse temperature must be > 0 (or inf), got {self.beta}")


@dataclass
class DiscreteBath:
    """Explicit finite mode collection; n_max is the per-mode Fock truncation
    used only by the exact-diagonalization reference, not by the kernels."""

    couplings: np.ndarray
    frequencies: np.ndarray
    n_max: int = 2

    def __post_init__(self):
        self.couplings = np.atleast_1d(np.asarray(self.couplings, dtype=complex))
        self.frequencies = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        if self.couplings.shape != self.frequencies.shape or self.couplings.ndim != 1:
            raise ConfigError("couplings and frequencies must be 1-D and equal length")
        if not np.all(self.frequencies > 0.0):
            raise ConfigError("mode frequencies must be positive")
        if self.n_max < 2:
            raise ConfigError(f"n_max must be >= 2, got {self.n_max}")

    @property
    def n_modes(self):
        return len(self.frequencies)

@dataclass(frozen=True)
class BathDescriptor:
    """Tagged union of the two bath variants plus thermodynamic parameters.

    Build with :meth:`continuous` or :meth:`discrete`; exactly one of
    ``spectral_density`` / ``modes`` is set.  Every kernel below accepts
    either variant.
    """

    params: BathParams
    spectral_density: SpectralDensity = None
    modes: DiscreteBath = None

    def __post_init__(self):
        if (self.spectral_density is None) == (self.modes is None):
            raise ConfigError("exactly one of spectral_density / modes required")

    @classmethod
    def continuous(cls, spectral_density, params=None):
        return cls(params=params or BathParams(), spectral_density=spectral_density)

    @classmethod
    def discrete(cls, modes, params=None):
        return cls(params=params or BathParams(), modes=modes)

    @property
    def is_discrete(self):
        return self.modes is not None


def _omega_coth(beta, w):
    """w * coth(beta w / 2), finite at w = 0; beta = inf collapses to w."""
    w = np.asarray(w, dtype=float)
    if math.isinf(beta):
        return w
    x = beta * w
    small = x < 1.0e-4
    out = np.empty_like(w)
    out[small] = 2.0 / beta + beta * w[small] ** 2 / 6.0  # coth series
    out[~small] = w[~small] / np.tanh(0.5 * x[~small])
    return out


def _coth_half(beta, w):
    """coth(beta w / 2) for strictly positive w; beta = inf gives 1."""
    w = np.asarray(w, dtype=float)
    if math.isinf(beta):
        return np.ones_like(w)
    x = beta * w
    small = x < 1.0e-4
    out = np.empty_like(w)
    out[small] = 2.0 / x[small] + x[small] / 6.0
    out[~small] = 1.0 / np.tanh(0.5 * x[~small])
    return out


def _sinx_minus_x_over_x2(x):
    """(sin x - x) / x**2, series-switched to dodge the small-x cancellation."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 0.6
    xs = x[small]
    x2 = xs * xs
    # sum_{k>=1} (-1)^k x^(2k-1)/(2k+1)!  truncated after x^11
    out[small] = xs * (
        -1.0 / 6.0
        + x2
        * (
            1.0 / 120.0
            + x2
            * (
                -1.0 / 5040.0
                + x2 * (1.0 / 362880.0 + x2 * (-1.0 / 39916800.0 + x2 / 6227020800.0))
            )
        )
    )
    xl = x[~small]
    out[~small] = (np.sin(xl) - xl) / (xl * xl)
    return out


def _kernel_value(bath, phi, osc_scale, thermal, scalar):
    """Common evaluation path: phi(w) -> (B, M) is the stable PHI(w)/w^2.

    Discrete: sum_r 4|g_r|^2 phi(w_r) [coth].  Continuous: the integral
    int dw w^(s-1) * [4 G w_c^(1-s) cutoff(w) * phi(w) * (w coth | w)].
    """
    beta = bath.params.beta
    if bath.is_discrete:
        w = bath.modes.frequencies
        weights = 4.0 * np.abs(bath.modes.couplings) ** 2
        if thermal:
            weights = weights * _coth_half(beta, w)
        out = phi(w) @ weights
    else:
        sd = bath.spectral_density
        pref = 4.0 * sd.g * sd.omega_c ** (1.0 - sd.s)

        if sd.cutoff is CutoffForm.EXPONENTIAL:
            def f(w):
                env = pref * np.exp(-w / sd.omega_c)
                env = env * (_omega_coth(beta, w) if thermal else w)
                return phi(w) * env
            decay = sd.omega_c
        else:
            def f(w):
                env = pref * (_omega_coth(beta, w) if thermal else w)
                return phi(w) * env
            decay = None

        out = power_law_integral(
            f,
            sd.s,
            sd.support_upper,
            osc_scale=osc_scale,
            decay_scale=decay,
            beta=None if math.isinf(beta) else beta,
        )
    return float(out[0]) if scalar else out


def _time_batch(t):
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if arr.ndim != 1:
        raise ConfigError("time argument must be scalar or 1-D")
    return arr, np.ndim(t) == 0

def gamma_t(bath, t):
    """Decoherence exponent gamma(t); non-negative, zero at t = 0."""
    t_arr, scalar = _time_batch(t)
    if np.any(t_arr < 0.0):
        raise ConfigError("gamma_t requires t >= 0")

    def phi(w):
        x = 0.5 * np.multiply.outer(t_arr, w)
        return 2.0 * np.sin(x) ** 2 / w**2

    return _kernel_value(bath, phi, float(np.max(t_arr, initial=0.0)), True, scalar)


def delta_t(bath, t):
    """Bath-induced phase-shift exponent Delta(t); non-positive for t >= 0."""
    t_arr, scalar = _time_batch(t)
    if np.any(t_arr < 0.0):
        raise ConfigError("delta_t requires t >= 0")

    def phi(w):
        x = np.multiply.outer(t_arr, w)
        return _sinx_minus_x_over_x2(x) * t_arr[:, None] ** 2

    return _kernel_value(bath, phi, float(np.max(t_arr, initial=0.0)), False, scalar)


def mu_pair(bath, p, p_prime, tau):
    """Inter-measurement commutator phase mu_{p p'}(tau); odd in p - p'."""
    _check_measurement_indices(p, p_prime, tau)
    lag = p - p_prime

    def phi(w):
        wt = w * tau
        return (np.sin(lag * wt) * 2.0 * np.sin(0.5 * wt) ** 2 / w**2)[None, :]

    osc = (abs(lag) + 1.0) * tau
    return _kernel_value(bath, phi, osc, False, True)


def gamma_pair(bath, p, p_prime, tau):
    """Thermal cross correlation gamma_{p p'}(tau); even in p - p'."""
    _check_measurement_indices(p, p_prime, tau)
    lag = p - p_prime

    def phi(w):
        wt = w * tau
        return (2.0 * np.sin(0.5 * wt) ** 2 * np.cos(lag * wt) / w**2)[None, :]

    osc = (abs(lag) + 1.0) * tau
    return _kernel_value(bath, phi, osc, True, True)


def epsilon_pn(bath, p, segment, t_prime, tau):
    """Memory kernel coupling measurement p to the running segment.

    `segment` is the ordinal N of the current inter-measurement interval
    (segment N starts after N - 1 completed measurements); t_prime is the
    time elapsed inside it.  Exactly zero at t_prime = 0.
    """
    t_arr, scalar = _check_segment_args(p, segment, t_prime, tau)
    theta = (2.0 * (p - segment) + 1.0) * tau - t_arr  # (B,)

    def phi(w):
        half = 0.5 * w
        a = np.sin(np.multiply.outer(t_arr, half))
        b = np.cos(np.multiply.outer(theta, half))
        return 4.0 * a * b * (np.sin(half * tau) / w**2)[None, :]

    osc = (segment - p) * tau + float(np.max(t_arr, initial=0.0))
    return _kernel_value(bath, phi, osc, True, scalar)


def sigma_pn(bath, p, segment, t_prime, tau):
    """Imaginary part of the segment memory phase (the real coefficient).

    The associated operator-ordering phase is i times this value; only the
    real number is computed and stored.  Exactly zero at t_prime = 0.
    """
    t_arr, scalar = _check_segment_args(p, segment, t_prime, tau)
    theta = (2.0 * (p - segment) + 1.0) * tau - t_arr

    def phi(w):
        half = 0.5 * w
        a = np.sin(np.multiply.outer(t_arr, half))
        b = np.sin(np.multiply.outer(theta, half))
        return 2.0 * a * b * (np.sin(half * tau) / w**2)[None, :]

    osc = (segment - p) * tau + float(np.max(t_arr, initial=0.0))
    return _kernel_value(bath, phi, osc, False, scalar)


def _check_measurement_indices(p, p_prime, tau):
    if not (isinstance(p, (int, np.integer)) and isinstance(p_prime, (int, np.integer))):
        raise ConfigError("measurement indices must be integers")
    if p < 1 or p_prime < 1:
        raise ConfigError("measurement indices start at 1")
    if not tau > 0.0:
        raise ConfigError(f"tau must be > 0, got {tau}")


def _check_segment_args(p, segment, t_prime, tau):
    _check_measurement_indices(p, segment, tau)
    if p >= segment:
        raise ConfigError(f"need p < segment, got p={p}, segment={segment}")
    t_arr, scalar = _time_batch(t_prime)
    if np.any(t_arr < 0.0):
        raise ConfigError("t_prime must be >= 0")
    return t_arr, scalar


def discretize_spectral_density(spectral_density, n_modes, omega_max, n_max=2):
    """Sample a continuum into n_modes discrete modes by midpoint binning.

    Uniform bins on (0, omega_max]; each mode sits at a bin midpoint and
    carries |g_r|^2 = J(w_r) * bin_width.  Kernel sums over the result
    converge to the continuum kernels as n_modes grows.
    """
    if n_modes < 1:
        raise ConfigError(f"n_modes must be >= 1, got {n_modes}")
    if not omega_max > 0.0:
        raise ConfigError(f"omega_max must be > 0, got {omega_max}")
    width = omega_max / n_modes
    centers = (np.arange(n_modes) + 0.5) * width
    g = np.sqrt(spectral_density.j(centers) * width)
    return DiscreteBath(couplings=g.astype(complex), frequencies=centers, n_max=n_max)
