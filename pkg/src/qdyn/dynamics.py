"""State trajectories from the exact maps and from the time-local generator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, IntegrationError
from .models import (
    DEPHASING,
    PAULI,
    bloch_map,
    decay_rates,
    maps_on_grid,
    singular_times,
)
from .qubit import BALL_TOL, as_bloch

#: default local tolerance of the integration oracle
ODE_TOL = 1e-9
#: default number of grid points
GRID_POINTS = 2000


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    t1: float
    n_points: int = GRID_POINTS

    def __post_init__(self):
        if not (0.0 <= self.t0 < self.t1) or not np.isfinite(self.t1):
            raise DomainError(f"need 0 <= t0 < t1, got [{self.t0}, {self.t1}]")
        if self.n_points < 2:
            raise DomainError("a time grid needs at least two points")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_points)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (N, 3)

    def __len__(self) -> int:
        return len(self.times)


def evolve(model, n0, t: float) -> np.ndarray:
    """Apply the dynamical map at time ``t`` to the Bloch vector ``n0``."""
    return bloch_map(model, t).apply(as_bloch(n0))


def trajectory(model, n0, grid: TimeGrid) -> Trajectory:
    n0 = as_bloch(n0)
    ts = grid.times
    M, b = maps_on_grid(model, ts)
    states = np.einsum("kij,j->ki", M, n0) + b
    if ts[0] == 0.0:
        states[0] = n0
    return Trajectory(ts, states)


def _rotation(h: float) -> np.ndarray:
    # d/dt (x, y) under the Hamiltonian h σ_z
    return np.array([[0.0, -2.0 * h, 0.0], [2.0 * h, 0.0, 0.0], [0.0, 0.0, 0.0]])


def generator(model, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Bloch-space generator ``(A, b)`` with dn/dt = A n + b at time ``t``.

    Raises ``SingularRateError`` where a rate diverges.
    """
    g1, g2, g3, hz = decay_rates(model, t)
    b = np.zeros(3)
    if isinstance(model, PAULI):
        return np.diag([-2 * (g2 + g3), -2 * (g1 + g3), -2 * (g1 + g2)]), b
    if isinstance(model, DEPHASING):
        return np.diag([-2 * g3, -2 * g3, 0.0]) + _rotation(hz), b
    b[2] = g1
    return np.diag([-0.5 * g1, -0.5 * g1, -g1]) + _rotation(hz), b


def ode_oracle_trajectory(model, n0, grid: TimeGrid, tol: float = ODE_TOL) -> Trajectory:
    """Trajectory by adaptive Dormand-Prince integration of the generator.

    Independent of the closed-form maps. Refuses windows containing a
    divergence of the generator (a zero of G or of λ1): the map is not
    invertible there, so no time-local integration can continue past it.
    Other integration failures surface as ``IntegrationError`` as well.
    """
    if tol <= 0:
        raise DomainError("tol must be > 0")
    n0 = as_bloch(n0)
    ts = grid.times
    bad = singular_times(model, ts[0], ts[-1])
    if bad:
        raise IntegrationError("window crosses a divergence of the generator", bad[0])
    states = _kernels.integrate_affine(
        model.code, model.params, lambda t: generator(model, t), n0, ts, tol
    )
    return Trajectory(ts, states)


def max_deviation(a: Trajectory, b: Trajectory) -> float:
    return float(np.max(np.abs(a.states - b.states)))


def in_ball(traj: Trajectory, tol: float = BALL_TOL) -> bool:
    return bool(np.all(np.linalg.norm(traj.states, axis=1) <= 1.0 + tol))


__all__ = [
    "TimeGrid",
    "Trajectory",
    "evolve",
    "trajectory",
    "generator",
    "ode_oracle_trajectory",
    "max_deviation",
    "in_ball",
]
