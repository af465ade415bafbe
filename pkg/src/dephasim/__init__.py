"""Two-qubit pure-dephasing dynamics under repeated projective measurements.

Closed-form density-matrix evolution for a pair of qubits coupled to a
common bosonic environment, in two variants: the environment rethermalized
after every measurement (reset) and the environment carried through every
measurement (tracked).  An exact finite-dimensional reference propagator
(oracle) validates both closed forms on discrete baths.
"""

from ._tracked import TRACKED_BACKEND
from .bath import (
    BathDescriptor,
    BathParams,
    CutoffForm,
    DiscreteBath,
    SpectralDensity,
    delta_t,
    discretize_spectral_density,
    epsilon_pn,
    gamma_pair,
    gamma_t,
    mu_pair,
    sigma_pn,
)
from .entanglement import ConcurrenceResult, concurrence, spin_flip
from .errors import (
    ComplexityError,
    ConfigError,
    DephasimError,
    QuadratureError,
    TruncationWarning,
    VanishingProbabilityError,
)
from .experiments import (
    Mode,
    Preparation,
    ScenarioConfig,
    SweepRecord,
    TrajectoryRecord,
    emit_records,
    run_interval_sweep,
    run_trajectory,
)
from .qubits import (
    HARD_CAP_MEASUREMENTS,
    KernelCache,
    MeasurementSchedule,
    SystemParams,
    TwoQubitPureState,
    basis_index,
    density_matrix_diagnostics,
    enumerate_index_terms,
    evolve_reset,
    evolve_tracked,
    normalization_z,
    reset_matrix,
    segment_grid,
    segment_split,
    state_bell,
    state_product_x,
    tracked_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "TRACKED_BACKEND",
    "BathDescriptor",
    "BathParams",
    "CutoffForm",
    "DiscreteBath",
    "SpectralDensity",
    "delta_t",
    "discretize_spectral_density",
    "epsilon_pn",
    "gamma_pair",
    "gamma_t",
    "mu_pair",
    "sigma_pn",
    "ConcurrenceResult",
    "concurrence",
    "spin_flip",
    "ComplexityError",
    "ConfigError",
    "DephasimError",
    "QuadratureError",
    "TruncationWarning",
    "VanishingProbabilityError",
    "Mode",
    "Preparation",
    "ScenarioConfig",
    "SweepRecord",
    "TrajectoryRecord",
    "emit_records",
    "run_interval_sweep",
    "run_trajectory",
    "HARD_CAP_MEASUREMENTS",
    "KernelCache",
    "MeasurementSchedule",
    "SystemParams",
    "TwoQubitPureState",
    "basis_index",
    "density_matrix_diagnostics",
    "enumerate_index_terms",
    "evolve_reset",
    "evolve_tracked",
    "normalization_z",
    "reset_matrix",
    "segment_grid",
    "segment_split",
    "state_bell",
    "state_product_x",
    "tracked_matrix",
    "__version__",
]
