"""Units for the adaptive power-law quadrature driver."""

import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn
from scipy.special import gammainc

from dephasim._quadrature import power_law_integral
from dephasim.errors import QuadratureError


def exp_moment(s, scale, upper):
    """Closed form of integral of w^(s-1) exp(-w/scale) over (0, upper)."""
    return gamma_fn(s) * gammainc(s, upper / scale) * scale**s


@pytest.mark.parametrize("s", [0.1, 0.5, 1.0, 2.3])
def test_exponential_moment(s):
    scale = 2.0
    upper = 60.0 * scale
    got = power_law_integral(
        lambda w: np.exp(-w / scale), s, upper, decay_scale=scale
    )
    want = exp_moment(s, scale, upper)
    assert got == pytest.approx(want, rel=1e-10)


@pytest.mark.parametrize("s", [0.3, 1.5])
@pytest.mark.parametrize("a", [0.7, 3.0])
def test_oscillatory_moment(s, a):
    # integral of w^(s-1) exp(-w/scale) cos(a w) = Re Gamma(s) (1/scale - i a)^-s
    # up to an exp(-60) truncation remainder
    scale = 2.0
    upper = 60.0 * scale
    got = power_law_integral(
        lambda w: np.exp(-w / scale) * np.cos(a * w),
        s,
        upper,
        osc_scale=a,
        decay_scale=scale,
    )
    want = (gamma_fn(s) * (1.0 / scale - 1j * a) ** (-s)).real
    assert got == pytest.approx(want, rel=1e-8, abs=1e-12)


def test_batch_integrands_share_nodes():
    scale = 1.0
    upper = 30.0

    def f(w):
        return np.stack([np.exp(-w), w * np.exp(-w), np.cos(w) * np.exp(-w)])

    got = power_law_integral(f, 0.5, upper, osc_scale=1.0, decay_scale=scale)
    assert got.shape == (3,)
    assert got[0] == pytest.approx(exp_moment(0.5, 1.0, upper), rel=1e-9)
    assert got[1] == pytest.approx(exp_moment(1.5, 1.0, upper), rel=1e-9)
    assert got[2] == pytest.approx(
        (gamma_fn(0.5) * (1.0 - 1j) ** -0.5).real, rel=1e-8
    )


def test_thermal_head_matches_zero_temperature_limit():
    # coth(beta w / 2) -> 1 for beta w >> 1, so a huge beta must reproduce
    # the beta = inf value
    scale, s = 2.0, 1.5

    def thermal(beta):
        return power_law_integral(
            lambda w: np.exp(-w / scale) / np.tanh(0.5 * beta * w),
            s,
            60.0 * scale,
            decay_scale=scale,
            beta=beta,
        )

    cold = thermal(1e6)
    free = power_law_integral(
        lambda w: np.exp(-w / scale), s, 60.0 * scale, decay_scale=scale
    )
    assert cold == pytest.approx(free, rel=1e-6)


def test_rejects_bad_exponent_and_limits():
    with pytest.raises(ValueError):
        power_law_integral(np.exp, 0.0, 1.0)
    with pytest.raises(ValueError):
        power_law_integral(np.exp, -1.0, 1.0)
    with pytest.raises(ValueError):
        power_law_integral(np.exp, 1.0, 0.0)


def test_non_finite_integrand_raises_quadrature_error():
    def bad(w):
        out = np.exp(-w)
        out[w > 0.5] = np.nan
        return out

    with pytest.raises(QuadratureError):
        power_law_integral(bad, 1.0, 10.0)


def test_stalled_refinement_reports_interval():
    # a discontinuous integrand defeats polynomial refinement; the error
    # carries the interval for diagnosis
    def step(w):
        return np.where(math.pi / 4.0 < w, 1.0, 0.0) * np.exp(-w / 50.0)

    with pytest.raises(QuadratureError) as err:
        power_law_integral(step, 1.0, 10.0, rtol=1e-13, atol=1e-15)
    assert err.value.interval is not None
