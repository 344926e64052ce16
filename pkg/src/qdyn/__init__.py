"""Speed of evolution and non-Markovianity of single-qubit open dynamics."""

from ._kernels import BACKEND
from .config import RunConfig, parse_config
from .dynamics import TimeGrid, Trajectory, evolve, generator, ode_oracle_trajectory, trajectory
from .errors import (
    ConfigError,
    DomainError,
    IntegrationError,
    QdynError,
    RunError,
    SingularIntermediateError,
    SingularRateError,
    UnsupportedModelError,
)
from .models import (
    MODEL_TYPES,
    JaynesCummings,
    OhmicDephasing,
    PauliTan,
    PauliTanh,
    PolarizationDephasing,
    bloch_map,
    decay_rates,
    decoherence_function,
    initial_speed_squared_closed_form,
    pauli_eigenvalues,
    table1_region,
)
from .nonmarkov import (
    NonMarkovReport,
    backflow_intervals,
    blp_measure,
    choi_min_eigenvalue,
    cp_divisibility_scan,
    intermediate_map,
    nonmarkov_report,
    ptm,
    rate_sign_divisibility,
    trace_distance_curve,
)
from .qubit import PureStateAngles, bloch_from_angles, density_from_bloch, fidelity, trace_distance
from .runner import run
from .speed import analytic_speed_squared, initial_speed_scan, speed_squared_fd
from .table1 import table1_report

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "RunConfig",
    "parse_config",
    "run",
    "TimeGrid",
    "Trajectory",
    "evolve",
    "generator",
    "trajectory",
    "ode_oracle_trajectory",
    "QdynError",
    "DomainError",
    "UnsupportedModelError",
    "SingularRateError",
    "IntegrationError",
    "SingularIntermediateError",
    "ConfigError",
    "RunError",
    "MODEL_TYPES",
    "OhmicDephasing",
    "PolarizationDephasing",
    "JaynesCummings",
    "PauliTanh",
    "PauliTan",
    "bloch_map",
    "decay_rates",
    "decoherence_function",
    "initial_speed_squared_closed_form",
    "pauli_eigenvalues",
    "table1_region",
    "NonMarkovReport",
    "trace_distance_curve",
    "backflow_intervals",
    "blp_measure",
    "rate_sign_divisibility",
    "ptm",
    "intermediate_map",
    "choi_min_eigenvalue",
    "cp_divisibility_scan",
    "nonmarkov_report",
    "PureStateAngles",
    "bloch_from_angles",
    "density_from_bloch",
    "fidelity",
    "trace_distance",
    "speed_squared_fd",
    "analytic_speed_squared",
    "initial_speed_scan",
    "table1_report",
]
