"""Single-qubit state algebra in the Bloch representation.

States are plain ``numpy`` arrays of shape ``(3,)`` (Bloch vectors) or
``(2, 2)`` (density matrices). The Bloch convention throughout the package is

    n = (sin θ cos φ, -sin θ sin φ, cos θ)

for the pure state cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>, with ρ = (I + n·σ)/2.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError

#: Allowed overshoot of |n| beyond the unit sphere.
BALL_TOL = 1e-9
#: Radicands of the fidelity formula above this negative value are clamped to zero.
RADICAND_TOL = 1e-12
# 1 - |n|^2 below this is rounding of a pure state, not mixedness
_PURITY_SNAP = 1e-14

PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class PureStateAngles(NamedTuple):
    """Polar and azimuthal angle of a pure qubit state."""

    theta: float
    phi: float = 0.0

    def validate(self) -> "PureStateAngles":
        if not (0.0 <= self.theta <= math.pi):
            raise DomainError(f"theta={self.theta} outside [0, pi]")
        if not (0.0 <= self.phi < 2 * math.pi):
            raise DomainError(f"phi={self.phi} outside [0, 2pi)")
        return self


def as_bloch(n, *, tol: float = BALL_TOL) -> np.ndarray:
    """Coerce ``n`` to a float Bloch vector and check it lies in the ball."""
    v = np.asarray(n, dtype=float)
    if v.shape != (3,):
        raise DomainError(f"Bloch vector must have shape (3,), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DomainError(f"non-finite Bloch vector {v}")
    r2 = float(v @ v)
    if r2 > (1.0 + tol) ** 2:
        raise DomainError(f"|n| = {math.sqrt(r2):.12g} exceeds 1 + {tol}")
    return v


def bloch_from_angles(angles) -> np.ndarray:
    """Bloch vector of the pure state with the given ``(theta, phi)``."""
    theta, phi = PureStateAngles(*angles).validate()
    st = math.sin(theta)
    return np.array([st * math.cos(phi), -st * math.sin(phi), math.cos(theta)])


def density_from_bloch(n) -> np.ndarray:
    v = as_bloch(n)
    return 0.5 * (PAULI[0] + v[0] * PAULI[1] + v[1] * PAULI[2] + v[2] * PAULI[3])


def bloch_from_density(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(rho @ PAULI[k]).real for k in (1, 2, 3)])


def _mixedness(v: np.ndarray) -> float:
    m = 1.0 - float(v @ v)
    if abs(m) < _PURITY_SNAP:
        return 0.0
    if m < 0.0:
        # overshoot permitted by BALL_TOL, treat as a pure state
        return 0.0
    return m


def fidelity(n1, n2) -> float:
    """Uhlmann fidelity of two qubit states given by Bloch vectors.

    Uses the closed form F = [1 + n1·n2 + sqrt((1-|n1|^2)(1-|n2|^2))] / 2,
    clamped to [0, 1].
    """
    a = as_bloch(n1)
    b = as_bloch(n2)
    radicand = _mixedness(a) * _mixedness(b)
    if radicand < -RADICAND_TOL:
        raise DomainError(f"negative fidelity radicand {radicand}")
    f = 0.5 * (1.0 + float(a @ b) + math.sqrt(max(radicand, 0.0)))
    return min(max(f, 0.0), 1.0)


def _check_density(rho: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise DomainError(f"density matrix must be 2x2, got {rho.shape}")
    if abs(np.trace(rho) - 1.0) > tol:
        raise DomainError("density matrix trace differs from 1")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise DomainError("density matrix is not Hermitian")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise DomainError("density matrix is not positive semidefinite")
    return rho


def _psd_sqrt(a: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(a)
    return (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T


def fidelity_matrix_oracle(rho1, rho2) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2 by eigendecomposition.

    Independent of the Bloch-vector formula; kept as a cross-check.
    """
    r1 = _check_density(rho1)
    r2 = _check_density(rho2)
    s = _psd_sqrt(r1)
    inner = s @ r2 @ s
    inner = 0.5 * (inner + inner.conj().T)
    mu = np.linalg.eigvalsh(inner)
    return float(np.sum(np.sqrt(np.clip(mu, 0.0, None))) ** 2)


def trace_distance(n1, n2) -> float:
    """Trace distance ½‖ρ1 - ρ2‖₁, which for qubits is ½|n1 - n2|."""
    a = as_bloch(n1)
    b = as_bloch(n2)
    return min(0.5 * float(np.linalg.norm(a - b)), 1.0)
