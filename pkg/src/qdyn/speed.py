"""Speed of evolution from the curvature of the fidelity to the initial state.

The squared speed is g(t) = -2 d²/dt² F(ρ(0), ρ(t)) (Bures metric). It is
reported as a signed curvature: for the Pauli families the tabulated initial
values are negative, and no square root is taken of them.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, UnsupportedModelError
from .models import (
    DEPHASING,
    PAULI,
    JaynesCummings,
    OhmicDephasing,
    PauliTan,
    PolarizationDephasing,
    closed_form_term_scale,
    decoherence_on_grid,
    initial_speed_squared_closed_form,
    map_deviations_on_grid,
    maps_on_grid,
    pauli_eigenvalues,
    pauli_second_derivatives,
    singular_times,
    table1_region,
)
from .qubit import PureStateAngles, bloch_from_angles

#: default finite-difference step, in the model's natural time unit
FD_STEP = 1e-4
#: step of the 5-point stencil on G used for the Ohmic analytic speed
G_STEP = 1e-3
#: relative tolerance of the FD cross-check inside scans
CROSS_CHECK_RTOL = 1e-3
#: successive differences smaller than this break strict monotonicity
TIE_TOL = 1e-12
SCAN_POINTS = 64


@dataclass(frozen=True)
class SpeedSample:
    t: float
    v_squared: float
    h: float
    stencil: str
    warning: Optional[str] = None

    @property
    def speed(self) -> Optional[float]:
        """v(t) where the curvature is non-negative, else ``None``."""
        return math.sqrt(self.v_squared) if self.v_squared >= 0 else None


def fidelity_curve(model, angles, times) -> np.ndarray:
    """F(ρ(0), ρ(t)) for a pure initial state on an ascending time array.

    With a pure initial state the square-root term of the qubit fidelity
    vanishes identically, leaving (1 + n(0)·n(t))/2.
    """
    n0 = bloch_from_angles(angles)
    M, b = maps_on_grid(model, times)
    nt = np.einsum("kij,j->ki", M, n0) + b
    return np.clip(0.5 * (1.0 + nt @ n0), 0.0, 1.0)


def fidelity_deficit_curve(model, angles, times) -> np.ndarray:
    """1 - F(ρ(0), ρ(t)) for a pure initial state, free of cancellation.

    Equals -n(0)·(n(t) - n(0))/2, built from the map deviation M - I so that
    the small-t values keep full relative precision.
    """
    n0 = bloch_from_angles(angles)
    D, b = map_deviations_on_grid(model, times)
    return -0.5 * ((np.einsum("kij,j->ki", D, n0) + b) @ n0)


def fidelity_to_initial(model, angles, t: float) -> float:
    if t < 0:
        raise DomainError(f"time must be >= 0, got {t}")
    if t == 0:
        return 1.0
    return float(fidelity_curve(model, angles, [float(t)])[0])


def closed_form_fidelity(model, angles, t: float) -> float:
    """Family-specific closed forms of the fidelity to the initial state."""
    theta = PureStateAngles(*angles).validate().theta
    if isinstance(model, PAULI):
        l1, _, l3 = pauli_eigenvalues(model, t)
        return 0.25 * (2 + l1 + l3 + (l3 - l1) * math.cos(2 * theta))
    g = complex(decoherence_on_grid(model, [t])[0]) if t > 0 else 1.0 + 0j
    if isinstance(model, DEPHASING):
        return 0.25 * (3 + math.cos(2 * theta) + 2 * g.real * math.sin(theta) ** 2)
    ct = math.cos(theta)
    return 0.5 * (1 + ct - 2 * abs(g) ** 2 * ct * math.sin(theta / 2) ** 2 + g.real * math.sin(theta) ** 2)


def natural_rate(model) -> float:
    """Largest frequency scale of ``model``; sets how small FD steps must be."""
    if isinstance(model, OhmicDephasing):
        return model.omega_c * max(1.0, math.sqrt(math.gamma(model.s + 1.0)))
    if isinstance(model, PolarizationDephasing):
        return abs(model.dn) * max(abs(model.omega1), abs(model.omega2), model.sigma, 1e-300)
    if isinstance(model, JaynesCummings):
        return max(model.lam, abs(model.big_omega), abs(model.delta), 2 * model.w)
    return max(2 * model.lam, model.omega, 1e-300)


def _guard_kinks(model, lo: float, hi: float, h: float) -> None:
    if isinstance(model, PauliTan):
        near = singular_times(model, max(lo - 10 * h, 0.0), hi + 10 * h)
        if near:
            raise DomainError(f"stencil within 10h of the |cos| kink at t={near[0]}")


def speed_squared_fd(model, angles, t: float = 0.0, h: float = FD_STEP) -> SpeedSample:
    """-2 F''(t) by finite differences of the fidelity to the initial state.

    A second-order forward stencil is used for t < 3h (the map is undefined
    at negative times); a central stencil otherwise.
    """
    if h <= 0:
        raise DomainError("h must be > 0")
    if t < 0:
        raise DomainError("t must be >= 0")
    if t < 3 * h:
        pts = t + h * np.arange(4)
        stencil = "forward"
    else:
        pts = t + h * np.array([-1.0, 0.0, 1.0])
        stencil = "central"
    _guard_kinks(model, pts[0], pts[-1], h)
    # F'' = -(1 - F)''; the deficit carries no rounding floor near t = 0
    f = -fidelity_deficit_curve(model, angles, pts)
    if not np.all(np.isfinite(f)):
        raise DomainError(f"non-finite fidelity near t={t}")
    if stencil == "forward":
        d2 = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / (h * h)
    else:
        d2 = (f[0] - 2 * f[1] + f[2]) / (h * h)
    warning = None
    if h * natural_rate(model) > 0.05:
        warning = f"h={h} is coarse against the model rate {natural_rate(model):.3g}"
    return SpeedSample(float(t), float(-2.0 * d2), h, stencil, warning)


def _polarization_g_second(model: PolarizationDephasing, t: float) -> complex:
    a = (model.sigma * model.dn) ** 2
    c2, s2 = math.cos(model.xi) ** 2, math.sin(model.xi) ** 2
    k1, k2 = model.omega1 * model.dn, model.omega2 * model.dn
    e1, e2 = np.exp(1j * k1 * t), np.exp(1j * k2 * t)
    env = math.exp(-0.5 * a * t * t)
    p = c2 * e1 + s2 * e2
    dp = 1j * (k1 * c2 * e1 + k2 * s2 * e2)
    ddp = -(k1 * k1 * c2 * e1 + k2 * k2 * s2 * e2)
    return env * ((a * a * t * t - a) * p - 2 * a * t * dp + ddp)


def _ohmic_g_second(model: OhmicDephasing, t: float, h: float) -> float:
    # Υ is even in t, so G extends evenly to negative times
    pts = np.abs(t + h * np.arange(-2, 3))
    uniq, inv = np.unique(pts, return_inverse=True)
    g = decoherence_on_grid(model, uniq).real[inv]
    return float((-g[0] + 16 * g[1] - 30 * g[2] + 16 * g[3] - g[4]) / (12 * h * h))


def analytic_speed_squared(model, theta: float, t: float = 0.0, h: float = G_STEP) -> float:
    """Squared speed from the family formula in terms of G̈ or the Pauli λ̈'s."""
    if isinstance(model, JaynesCummings):
        raise UnsupportedModelError("use speed_squared_fd for the Jaynes-Cummings model")
    if isinstance(model, PAULI):
        _guard_kinks(model, t, t, h)
        d1, d3 = pauli_second_derivatives(model, t)
        return -0.5 * (d1 + d3 + (d3 - d1) * math.cos(2 * theta))
    if isinstance(model, PolarizationDephasing):
        g2 = _polarization_g_second(model, t).real
    else:
        g2 = _ohmic_g_second(model, t, h)
    return -g2 * math.sin(theta) ** 2


@dataclass
class MonotonicityReport:
    family: str
    parameter: str
    theta: float
    values: list
    v0_squared: list
    verdict: str
    regions: list = field(default_factory=list)
    cross_checks: list = field(default_factory=list)

    @property
    def cross_checks_ok(self) -> bool:
        return all(c["ok"] for c in self.cross_checks)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "parameter": self.parameter,
            "theta": self.theta,
            "verdict": self.verdict,
            "points": [
                {"value": v, "v0_squared": s, "indivisible": r.indivisible, "backflow": r.backflow}
                for v, s, r in zip(self.values, self.v0_squared, self.regions)
            ],
            "cross_checks": self.cross_checks,
            "cross_checks_ok": self.cross_checks_ok,
        }


def relative_error(value: float, reference: float, scale: float | None = None) -> float:
    """|value - reference| relative to ``max(|reference|, scale)``.

    ``scale`` should be the magnitude of the terms that make up ``reference``
    (see ``closed_form_term_scale``), so an exact cancellation to zero is
    measured against the size of the cancelling terms.
    """
    ref = max(abs(reference), scale or 0.0)
    if ref == 0.0:
        return abs(value - reference)
    return abs(value - reference) / ref


def monotonicity_verdict(values, tol: float = TIE_TOL) -> str:
    d = np.diff(np.asarray(values, dtype=float))
    if d.size and np.all(d > tol):
        return "strictly-increasing"
    if d.size and np.all(d < -tol):
        return "strictly-decreasing"
    return "non-monotonic"


def scan_values(lo: float, hi: float, n_points: int = SCAN_POINTS, open_lower: bool = False) -> np.ndarray:
    if n_points < 2 or not hi > lo:
        raise DomainError(f"empty scan range [{lo}, {hi}] with {n_points} points")
    if open_lower:
        return np.linspace(lo, hi, n_points + 1)[1:]
    return np.linspace(lo, hi, n_points)


def initial_speed_scan(
    template,
    parameter: str,
    values,
    theta: float = math.pi / 2,
    n_checks: int = 3,
    h: float = FD_STEP,
) -> MonotonicityReport:
    """Closed-form v(0)² across ``values`` of the family's driving parameter.

    ``n_checks`` evenly spread points are cross-validated against the
    finite-difference curvature.
    """
    if parameter != template.driving:
        raise DomainError(f"{template.kind} is driven by {template.driving!r}, not {parameter!r}")
    values = [float(v) for v in values]
    if len(values) < 2:
        raise DomainError("a scan needs at least two parameter values")
    models = [dataclasses.replace(template, **{parameter: v}) for v in values]
    v2 = [initial_speed_squared_closed_form(m, theta) for m in models]
    checks = []
    idx = sorted({round(i) for i in np.linspace(0, len(values) - 1, max(n_checks, 3))})
    for i in idx:
        fd = speed_squared_fd(models[i], (theta, 0.0), 0.0, h).v_squared
        err = relative_error(fd, v2[i], closed_form_term_scale(models[i], theta))
        checks.append({"value": values[i], "closed_form": v2[i], "fd": fd, "rel_err": err, "ok": err <= CROSS_CHECK_RTOL})
    return MonotonicityReport(
        family=template.kind,
        parameter=parameter,
        theta=theta,
        values=values,
        v0_squared=v2,
        verdict=monotonicity_verdict(v2),
        regions=[table1_region(m) for m in models],
        cross_checks=checks,
    )
