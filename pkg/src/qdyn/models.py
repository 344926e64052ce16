"""The six single-qubit channel families and their closed-form ingredients.

Every family is a frozen dataclass; ``ModelSpec`` is their union. All
frequencies and rates are dimensionless multiples of a caller-chosen
reference scale (ω_c, λ or Δn depending on the family), and times are in
the inverse unit.

Rate conventions
----------------
``decay_rates`` returns the coefficients of the time-local master equation
in Bloch form together with an effective Hamiltonian term ``h_z σ_z``:

* dephasing (Ohmic, polarization): ``gamma3`` multiplies σ_z ρ σ_z - ρ, so
  coherences decay as exp(-2∫gamma3). With G(t) the decoherence function,
  ``gamma3 = -Re(Ġ/G)/2`` and ``h_z = -Im(Ġ/G)/2``; for the Ohmic bath this
  is exactly the tabulated rate ω_c[1+(ω_c t)²]^{-s/2} Γ(s) sin(s arctan ω_c t).
* amplitude damping (Jaynes-Cummings): ``gamma1`` is the population decay
  rate ``-2 Re(Ġ/G)`` and ``h_z = Im(Ġ/G)/2``. The map relaxes towards +z.
* Pauli channels: ``gamma1 = gamma2 = λ/2`` and the tabulated ``gamma3``.

The Jaynes-Cummings normalisation ``W = γ_M λ/2 + Δ²/4`` is used
literally. It mixes units, and with it the coherence function starts
oscillating at ``γ_M λ = λ`` (i.e. ``γ_M = 1``), not at ``γ_M = λ/2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import ClassVar, NamedTuple, Union

import numpy as np

from . import _kernels
from .errors import DomainError, SingularRateError, UnsupportedModelError

#: absolute tolerance of the Ohmic decoherence exponent quadrature
QUAD_TOL = 1e-10
# JC series fallback below this |Ω t|
_OMEGA_SERIES = 1e-6
# |cos ωt| below this counts as a zero of the PauliTan eigenvalue
_KINK_TOL = 1e-12


@dataclass(frozen=True)
class OhmicDephasing:
    """Pure dephasing by a zero-temperature bosonic bath with Ohmic-class spectrum."""

    omega_c: float = 1.0
    s: float = 1.0

    kind: ClassVar[str] = "ohmic"
    driving: ClassVar[str] = "s"
    code: ClassVar[int] = _kernels.OHMIC

    def __post_init__(self):
        _positive(self, "omega_c")
        _positive(self, "s")

    @property
    def params(self) -> tuple:
        return (self.omega_c, self.s, math.gamma(self.s))


@dataclass(frozen=True)
class PolarizationDephasing:
    """Photon polarization dephased by its own bimodal frequency distribution."""

    dn: float = 1.0
    sigma: float = 0.0
    omega1: float = 1.0
    omega2: float = 2.0
    xi: float = 0.0

    kind: ClassVar[str] = "polarization"
    driving: ClassVar[str] = "xi"
    code: ClassVar[int] = _kernels.POLARIZATION

    def __post_init__(self):
        _finite(self)
        if self.sigma < 0:
            raise DomainError(f"sigma must be >= 0, got {self.sigma}")
        if not (0.0 <= self.xi <= math.pi / 2 + 1e-15):
            raise DomainError(f"xi must lie in [0, pi/2], got {self.xi}")

    @property
    def params(self) -> tuple:
        return (self.dn, self.sigma, self.omega1, self.omega2, self.xi)


@dataclass(frozen=True)
class JaynesCummings:
    """Two-level atom in a lossy cavity with Lorentzian spectral density."""

    lam: float = 1.0
    gamma_m: float = 1.0
    delta: float = 0.0

    kind: ClassVar[str] = "jc"
    driving: ClassVar[str] = "gamma_m"
    code: ClassVar[int] = _kernels.JAYNES_CUMMINGS

    def __post_init__(self):
        _positive(self, "lam")
        _finite(self)
        if self.gamma_m < 0:
            raise DomainError(f"gamma_m must be >= 0, got {self.gamma_m}")

    @property
    def params(self) -> tuple:
        return (self.lam, self.gamma_m, self.delta)

    @property
    def w(self) -> float:
        return 0.5 * self.gamma_m * self.lam + 0.25 * self.delta**2

    @property
    def big_omega(self) -> complex:
        lam, d, w = self.lam, self.delta, self.w
        return cmath.sqrt(lam * lam - 2j * lam * d - 4.0 * w * w)


@dataclass(frozen=True)
class PauliTanh:
    """Pauli channel with gamma3(t) = -(ω/2) tanh(ωt); requires 0 <= ω <= λ."""

    lam: float = 1.0
    omega: float = 0.0

    kind: ClassVar[str] = "pauli_tanh"
    driving: ClassVar[str] = "omega"
    code: ClassVar[int] = _kernels.PAULI_TANH

    def __post_init__(self):
        _positive(self, "lam")
        if not (0.0 <= self.omega <= self.lam):
            raise DomainError(f"need 0 <= omega <= lam, got omega={self.omega}, lam={self.lam}")

    @property
    def params(self) -> tuple:
        return (self.lam, self.omega)


@dataclass(frozen=True)
class PauliTan:
    """Pauli channel with gamma3(t) = (ω/2) tan(ωt)."""

    lam: float = 1.0
    omega: float = 0.0

    kind: ClassVar[str] = "pauli_tan"
    driving: ClassVar[str] = "omega"
    code: ClassVar[int] = _kernels.PAULI_TAN

    def __post_init__(self):
        _finite(self)
        if self.lam < 0 or self.omega < 0:
            raise DomainError("lam and omega must be >= 0")

    @property
    def params(self) -> tuple:
        return (self.lam, self.omega)


ModelSpec = Union[OhmicDephasing, PolarizationDephasing, JaynesCummings, PauliTanh, PauliTan]

MODEL_TYPES = {
    cls.kind: cls for cls in (OhmicDephasing, PolarizationDephasing, JaynesCummings, PauliTanh, PauliTan)
}
DEPHASING = (OhmicDephasing, PolarizationDephasing)
PAULI = (PauliTanh, PauliTan)


def _finite(model) -> None:
    for name, value in vars(model).items():
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value}")


def _positive(model, name: str) -> None:
    _finite(model)
    if getattr(model, name) <= 0:
        raise DomainError(f"{name} must be > 0, got {getattr(model, name)}")


def _check_time(t: float) -> float:
    t = float(t)
    if not (t >= 0.0 and math.isfinite(t)):
        raise DomainError(f"time must be finite and >= 0, got {t}")
    return t


def _require_g(model) -> None:
    if isinstance(model, PAULI):
        raise UnsupportedModelError(f"{model.kind} has no decoherence function; use pauli_eigenvalues")


class RateVector(NamedTuple):
    gamma1: float
    gamma2: float
    gamma3: float
    h_z: float


class AffineBlochMap(NamedTuple):
    """n(t) = M n(0) + b."""

    M: np.ndarray
    b: np.ndarray

    def apply(self, n) -> np.ndarray:
        return self.M @ np.asarray(n, dtype=float) + self.b


class RegionVerdict(NamedTuple):
    """Table-style Markovianity verdict: values are yes, no, none-ever or numeric."""

    indivisible: str
    backflow: str


# -- decoherence functions -------------------------------------------------


def ohmic_rate(model: OhmicDephasing, t):
    """Closed-form Ohmic dephasing rate; vectorised over ``t``."""
    x = model.omega_c * np.asarray(t, dtype=float)
    return model.omega_c * (1.0 + x * x) ** (-0.5 * model.s) * math.gamma(model.s) * np.sin(
        model.s * np.arctan(x)
    )


def ohmic_exponent(model: OhmicDephasing, times, tol: float = QUAD_TOL) -> np.ndarray:
    """Υ(t) = 2∫₀ᵗ rate, by adaptive Simpson quadrature on ascending ``times``."""
    ts = np.asarray(times, dtype=float)
    if ts.size and (np.any(np.diff(ts) < 0) or ts[0] < 0):
        raise DomainError("times must be ascending and non-negative")
    return _kernels.ohmic_upsilon(ts, model.omega_c, model.s, math.gamma(model.s), tol)


def _polarization_g(model: PolarizationDephasing, t):
    t = np.asarray(t, dtype=float)
    c2 = math.cos(model.xi) ** 2
    s2 = math.sin(model.xi) ** 2
    env = np.exp(-0.5 * (model.sigma * model.dn * t) ** 2)
    return env * (c2 * np.exp(1j * model.omega1 * model.dn * t) + s2 * np.exp(1j * model.omega2 * model.dn * t))


def _jc_parts(model: JaynesCummings, t: float) -> tuple[complex, complex]:
    # cosh(Ωt/2) and sinh(Ωt/2)/Ω, both even in Ω
    om = model.big_omega
    x = 0.5 * om * t
    if abs(om) * t < _OMEGA_SERIES:
        return 1.0 + 0.5 * x * x, 0.5 * t * (1.0 + x * x / 6.0)
    return cmath.cosh(x), cmath.sinh(x) / om


def _jc_g(model: JaynesCummings, t: float) -> complex:
    a = model.lam - 1j * model.delta
    c, s = _jc_parts(model, t)
    return cmath.exp(-0.5 * a * t) * (c + a * s)


def decoherence_function(model, t: float) -> complex:
    """G(t) for the dephasing and Jaynes-Cummings families."""
    _require_g(model)
    t = _check_time(t)
    if t == 0.0:
        return 1.0 + 0.0j
    if isinstance(model, OhmicDephasing):
        return complex(math.exp(-ohmic_exponent(model, [t])[0]))
    if isinstance(model, PolarizationDephasing):
        return complex(_polarization_g(model, t))
    return _jc_g(model, t)


def decoherence_on_grid(model, times) -> np.ndarray:
    """G at every entry of the ascending array ``times``."""
    _require_g(model)
    ts = np.asarray(times, dtype=float)
    if isinstance(model, OhmicDephasing):
        return np.exp(-ohmic_exponent(model, ts)).astype(complex)
    if isinstance(model, PolarizationDephasing):
        return np.asarray(_polarization_g(model, ts), dtype=complex)
    return np.array([_jc_g(model, float(t)) for t in ts], dtype=complex)


def log_derivative(model, t: float) -> complex:
    """Ġ(t)/G(t) in closed form; raises when G(t) = 0."""
    _require_g(model)
    t = _check_time(t)
    if isinstance(model, OhmicDephasing):
        return complex(-2.0 * float(ohmic_rate(model, t)))
    if isinstance(model, PolarizationDephasing):
        c2 = math.cos(model.xi) ** 2
        s2 = math.sin(model.xi) ** 2
        e1 = cmath.exp(1j * model.omega1 * model.dn * t)
        e2 = cmath.exp(1j * model.omega2 * model.dn * t)
        p = c2 * e1 + s2 * e2
        if p == 0:
            raise SingularRateError("decoherence function vanishes", t)
        dp = 1j * model.dn * (model.omega1 * c2 * e1 + model.omega2 * s2 * e2)
        r = -((model.sigma * model.dn) ** 2) * t + dp / p
    else:
        a = model.lam - 1j * model.delta
        c, s = _jc_parts(model, t)
        den = c + a * s
        if den == 0:
            raise SingularRateError("decoherence function vanishes", t)
        w = model.w
        r = 0.5 * (model.delta**2 - 4.0 * w * w) * s / den
    if not cmath.isfinite(r):
        raise SingularRateError("decoherence function vanishes", t)
    return r


def decay_rates(model, t: float) -> RateVector:
    """Canonical master-equation rates at time ``t`` (see module docstring)."""
    t = _check_time(t)
    if isinstance(model, PAULI):
        half = 0.5 * model.lam
        wt = model.omega * t
        if isinstance(model, PauliTanh):
            g3 = -0.5 * model.omega * math.tanh(wt)
        else:
            if model.omega > 0 and abs(math.cos(wt)) < _KINK_TOL:
                raise SingularRateError("gamma3 diverges where cos(omega t) = 0", t)
            g3 = 0.5 * model.omega * math.tan(wt)
        return RateVector(half, half, g3, 0.0)
    r = log_derivative(model, t)
    if isinstance(model, DEPHASING):
        return RateVector(0.0, 0.0, -0.5 * r.real, -0.5 * r.imag)
    return RateVector(-2.0 * r.real, 0.0, 0.0, 0.5 * r.imag)


# -- Pauli eigenvalues ------------------------------------------------------


def _pauli_lambdas(model, t):
    t = np.asarray(t, dtype=float)
    if isinstance(model, PauliTanh):
        l1 = np.exp(-model.lam * t) * np.cosh(model.omega * t)
    else:
        l1 = np.exp(-model.lam * t) * np.abs(np.cos(model.omega * t))
    return l1, np.exp(-2.0 * model.lam * t)


def pauli_eigenvalues(model, t: float) -> tuple[float, float, float]:
    """(λ1, λ2, λ3) of a Pauli-family map, with λ2 = λ1."""
    if not isinstance(model, PAULI):
        raise UnsupportedModelError(f"{model.kind} is not a Pauli channel")
    l1, l3 = _pauli_lambdas(model, _check_time(t))
    return float(l1), float(l1), float(l3)


def pauli_second_derivatives(model, t: float) -> tuple[float, float]:
    """Closed-form second time derivatives of (λ1, λ3)."""
    if not isinstance(model, PAULI):
        raise UnsupportedModelError(f"{model.kind} is not a Pauli channel")
    t = _check_time(t)
    lam, w = model.lam, model.omega
    e = math.exp(-lam * t)
    if isinstance(model, PauliTanh):
        d1 = e * ((lam * lam + w * w) * math.cosh(w * t) - 2 * lam * w * math.sinh(w * t))
    else:
        c = math.cos(w * t)
        sgn = 1.0 if c >= 0 else -1.0
        d1 = sgn * e * ((lam * lam - w * w) * c + 2 * lam * w * math.sin(w * t))
    return d1, 4.0 * lam * lam * math.exp(-2.0 * lam * t)


def _arithmetic_times(first: float, period: float, t0: float, t1: float) -> list[float]:
    k = max(math.ceil((t0 - first) / period), 0)
    out = []
    while first + k * period <= t1:
        out.append(first + k * period)
        k += 1
    return out


def singular_times(model, t0: float, t1: float) -> list[float]:
    """Times in [t0, t1] where a time-local rate of ``model`` diverges.

    These are the zeros of G(t) (or of λ1(t) for PauliTan), located in closed
    form: the polarization coherence vanishes only for equal peak weights,
    the resonant Jaynes-Cummings one only in its oscillatory regime, and the
    detuned Jaynes-Cummings one generically never.
    """
    if isinstance(model, PauliTan):
        if model.omega <= 0:
            return []
        period = math.pi / model.omega
        return _arithmetic_times(0.5 * period, period, t0, t1)
    if isinstance(model, PolarizationDephasing):
        beat = abs((model.omega2 - model.omega1) * model.dn)
        if beat == 0 or abs(math.cos(2 * model.xi)) > 1e-12:
            return []
        return _arithmetic_times(math.pi / beat, 2 * math.pi / beat, t0, t1)
    if isinstance(model, JaynesCummings):
        disc = 4.0 * model.w**2 - model.lam**2
        if model.delta != 0.0 or disc <= 0.0:
            return []
        nu = 0.5 * math.sqrt(disc)
        # cos(νt) + (λ/2ν) sin(νt) = 0
        return _arithmetic_times((math.pi - math.atan(2 * nu / model.lam)) / nu, math.pi / nu, t0, t1)
    return []


# -- Bloch maps -------------------------------------------------------------


def maps_on_grid(model, times) -> tuple[np.ndarray, np.ndarray]:
    """Stacked affine maps ``(M, b)`` with shapes ``(N, 3, 3)`` and ``(N, 3)``."""
    ts = np.asarray(times, dtype=float)
    n = ts.shape[0]
    M = np.zeros((n, 3, 3))
    b = np.zeros((n, 3))
    if isinstance(model, PAULI):
        l1, l3 = _pauli_lambdas(model, ts)
        M[:, 0, 0] = l1
        M[:, 1, 1] = l1
        M[:, 2, 2] = l3
        return M, b
    g = decoherence_on_grid(model, ts)
    gr, gi = g.real, g.imag
    M[:, 0, 0] = gr
    M[:, 1, 1] = gr
    if isinstance(model, DEPHASING):
        # x - i y picks up the factor G
        M[:, 0, 1] = gi
        M[:, 1, 0] = -gi
        M[:, 2, 2] = 1.0
    else:
        # x + i y picks up the factor G; populations relax towards +z
        g2 = gr * gr + gi * gi
        M[:, 0, 1] = -gi
        M[:, 1, 0] = gi
        M[:, 2, 2] = g2
        b[:, 2] = 1.0 - g2
    return M, b


def _expm1c(z):
    # e^z - 1 without cancellation for complex z near 0
    x, y = np.real(z), np.imag(z)
    return np.expm1(x) * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2 + 1j * np.exp(x) * np.sin(y)


def decoherence_deviation_on_grid(model, times) -> np.ndarray:
    """G(t) - 1 evaluated without cancellation, for small-t differencing."""
    _require_g(model)
    ts = np.asarray(times, dtype=float)
    if isinstance(model, OhmicDephasing):
        return np.expm1(-ohmic_exponent(model, ts)).astype(complex)
    if isinstance(model, PolarizationDephasing):
        c2 = math.cos(model.xi) ** 2
        s2 = math.sin(model.xi) ** 2
        env1 = np.expm1(-0.5 * (model.sigma * model.dn * ts) ** 2)
        p1 = c2 * _expm1c(1j * model.omega1 * model.dn * ts) + s2 * _expm1c(1j * model.omega2 * model.dn * ts)
        return env1 * (1.0 + p1) + p1
    a = model.lam - 1j * model.delta
    om = model.big_omega
    out = np.empty(ts.shape[0], dtype=complex)
    for k, t in enumerate(ts):
        x = 0.5 * om * t
        c, s = _jc_parts(model, float(t))
        c1 = 0.5 * x * x if abs(om) * t < _OMEGA_SERIES else 2.0 * cmath.sinh(0.5 * x) ** 2
        out[k] = _expm1c(-0.5 * a * t) * (c + a * s) + c1 + a * s
    return out


def map_deviations_on_grid(model, times) -> tuple[np.ndarray, np.ndarray]:
    """``(M - I, b)`` on a grid, accurate to relative precision as t -> 0."""
    ts = np.asarray(times, dtype=float)
    n = ts.shape[0]
    D = np.zeros((n, 3, 3))
    b = np.zeros((n, 3))
    if isinstance(model, PAULI):
        wt = model.omega * ts
        e1 = np.expm1(-model.lam * ts)
        if isinstance(model, PauliTanh):
            ch = np.cosh(wt)
            l1 = e1 * ch + 2.0 * np.sinh(0.5 * wt) ** 2
        else:
            c = np.cos(wt)
            ac1 = np.where(c >= 0, -2.0 * np.sin(0.5 * wt) ** 2, -2.0 * np.cos(0.5 * wt) ** 2)
            l1 = e1 * np.abs(c) + ac1
        D[:, 0, 0] = l1
        D[:, 1, 1] = l1
        D[:, 2, 2] = np.expm1(-2.0 * model.lam * ts)
        return D, b
    d = decoherence_deviation_on_grid(model, ts)
    dr, di = d.real, d.imag
    D[:, 0, 0] = dr
    D[:, 1, 1] = dr
    if isinstance(model, DEPHASING):
        D[:, 0, 1] = di
        D[:, 1, 0] = -di
    else:
        # |1 + d|^2 - 1
        g2m1 = 2.0 * dr + dr * dr + di * di
        D[:, 0, 1] = -di
        D[:, 1, 0] = di
        D[:, 2, 2] = g2m1
        b[:, 2] = -g2m1
    return D, b


def bloch_map(model, t: float) -> AffineBlochMap:
    """Exact affine Bloch map of ``model`` at time ``t``."""
    t = _check_time(t)
    if t == 0.0:
        return AffineBlochMap(np.eye(3), np.zeros(3))
    M, b = maps_on_grid(model, [t])
    return AffineBlochMap(M[0], b[0])


# -- closed-form initial speeds and regions --------------------------------


def initial_speed_squared_closed_form(model, theta: float) -> float:
    """Tabulated squared initial speed v(0)² for pure initial polar angle ``theta``."""
    st2 = math.sin(theta) ** 2
    if isinstance(model, OhmicDephasing):
        return 2.0 * model.omega_c**2 * math.gamma(model.s + 1.0) * st2
    if isinstance(model, PolarizationDephasing):
        w1, w2 = model.omega1, model.omega2
        return 0.5 * model.dn**2 * (2 * model.sigma**2 + w1 * w1 + w2 * w2 - (w2 * w2 - w1 * w1) * math.cos(2 * model.xi)) * st2
    if isinstance(model, JaynesCummings):
        s4 = math.sin(0.5 * theta) ** 4
        if model.delta == 0.0:
            return model.gamma_m**2 * model.lam**2 * s4
        return (4.0 * model.w**2 - model.delta**2) * s4
    ct2 = math.cos(theta) ** 2
    lam, w = model.lam, model.omega
    if isinstance(model, PauliTanh):
        return -4 * lam * lam * ct2 - (lam * lam + w * w) * st2
    return -4 * lam * lam * ct2 - (lam * lam - w * w) * st2


def closed_form_term_scale(model, theta: float) -> float:
    """Sum of the magnitudes of the terms in the tabulated v(0)² formula.

    Equals |v(0)²| unless terms cancel; it is the reference magnitude for
    relative comparisons, which are undefined where the formula is exactly 0.
    """
    st2 = math.sin(theta) ** 2
    if isinstance(model, OhmicDephasing):
        return abs(initial_speed_squared_closed_form(model, theta))
    if isinstance(model, PolarizationDephasing):
        w1, w2 = model.omega1, model.omega2
        return 0.5 * model.dn**2 * (2 * model.sigma**2 + w1 * w1 + w2 * w2 + abs((w2 * w2 - w1 * w1) * math.cos(2 * model.xi))) * st2
    if isinstance(model, JaynesCummings):
        if model.delta == 0.0:
            return abs(initial_speed_squared_closed_form(model, theta))
        return (4.0 * model.w**2 + model.delta**2) * math.sin(0.5 * theta) ** 4
    ct2 = math.cos(theta) ** 2
    return 4 * model.lam**2 * ct2 + (model.lam**2 + model.omega**2) * st2


def jc_detuned_speed_squared(model: JaynesCummings, theta: float) -> float:
    """The detuned-row expression (4W² - Δ²) sin⁴(θ/2), valid at any Δ."""
    return (4.0 * model.w**2 - model.delta**2) * math.sin(0.5 * theta) ** 4


def table1_region(model) -> RegionVerdict:
    """Closed-form Markovianity verdict where one is tabulated, else ``numeric``."""
    if isinstance(model, OhmicDephasing):
        v = "yes" if model.s > 2 else "no"
        return RegionVerdict(v, v)
    if isinstance(model, PolarizationDephasing):
        return RegionVerdict("numeric", "numeric")
    if isinstance(model, JaynesCummings):
        if model.delta != 0.0:
            return RegionVerdict("numeric", "numeric")
        v = "yes" if model.gamma_m > model.lam / 2 else "no"
        return RegionVerdict(v, v)
    if isinstance(model, PauliTanh):
        return RegionVerdict("yes" if model.omega > 0 else "no", "none-ever")
    v = "yes" if model.omega > 0 else "no"
    return RegionVerdict(v, v)
