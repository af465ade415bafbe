import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))  # for quad_oracle

from dephasim.bath import (
    BathDescriptor,
    BathParams,
    CutoffForm,
    DiscreteBath,
    SpectralDensity,
)


@pytest.fixture
def subohmic_bath():
    """s=0.1 continuum bath at beta=1 (the frozen-literal operating point)."""
    sd = SpectralDensity(g=1.0, s=0.1, omega_c=2.0, cutoff=CutoffForm.EXPONENTIAL)
    return BathDescriptor.continuous(sd, BathParams(beta=1.0))


@pytest.fixture
def cold_subohmic_bath():
    sd = SpectralDensity(g=1.0, s=0.1, omega_c=2.0, cutoff=CutoffForm.EXPONENTIAL)
    return BathDescriptor.continuous(sd, BathParams(beta=100.0))


@pytest.fixture
def one_mode_bath():
    """Single discrete mode used by the exact-diagonalization checks."""
    return BathDescriptor.discrete(
        DiscreteBath(couplings=[0.2], frequencies=[1.5], n_max=20),
        BathParams(beta=2.0),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_pure_state(rng):
    from dephasim.qubits import TwoQubitPureState

    amps = rng.normal(size=4) + 1j * rng.normal(size=4)
    return TwoQubitPureState.normalized(amps)
