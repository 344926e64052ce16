"""Backflow of information and CP-divisibility diagnostics.

Backflow uses the trace-distance measure: the total increase of the
distinguishability D(t) of a pair of evolved states, maximised over pairs.
Divisibility is tested two ways: from the signs of the canonical rates, and
from the Choi spectrum of the intermediate maps T(t) T(s)^-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, SingularIntermediateError, SingularRateError
from .models import OhmicDephasing, decay_rates, maps_on_grid, ohmic_rate, singular_times
from .qubit import PAULI, bloch_from_angles

#: trace-distance slope above which a sample interval counts as backflow
SLOPE_TOL = 1e-10
#: measures below this are reported as zero backflow
BLP_ZERO_TOL = 1e-8
#: rates below -RATE_TOL break divisibility
RATE_TOL = 1e-12
#: Choi eigenvalues below -CHOI_TOL break complete positivity
CHOI_TOL = 1e-10
#: T(s) with a larger condition number is not inverted
MAX_COND = 1e12
PAIR_GRID = 8  # 8 x 8 = 64 antipodal pairs
SCAN_GRID = 40
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Interval:
    t_start: float
    t_end: float
    gain: float


@dataclass(frozen=True)
class Divisibility:
    divisible: bool
    method: str
    witness: Optional[dict] = None
    skipped: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"divisible": self.divisible, "method": self.method, "witness": self.witness, "skipped": self.skipped}


@dataclass
class BLPResult:
    measure: float
    optimal_pair: tuple
    intervals: list
    pairs_evaluated: int


@dataclass
class NonMarkovReport:
    family: str
    horizon: float
    blp_measure: float
    optimal_pair: tuple
    backflow_intervals: list
    divisibility: Divisibility
    rate_divisibility: Divisibility
    notes: list = field(default_factory=list)

    @property
    def backflow(self) -> bool:
        return self.blp_measure > 0.0

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "horizon": self.horizon,
            "blp_measure": self.blp_measure,
            "backflow": self.backflow,
            "optimal_pair": [list(p) for p in self.optimal_pair],
            "backflow_intervals": [[i.t_start, i.t_end, i.gain] for i in self.backflow_intervals],
            "divisibility": self.divisibility.to_dict(),
            "rate_divisibility": self.rate_divisibility.to_dict(),
            "notes": self.notes,
        }


# -- trace distance and backflow ---------------------------------------------


def _evolved(M: np.ndarray, b: np.ndarray, n0: np.ndarray) -> np.ndarray:
    return np.einsum("kij,j->ki", M, n0) + b


def trace_distance_curve(model, pair, times) -> np.ndarray:
    """D(t) between the evolved images of two pure states given by angles."""
    ts = np.asarray(times, dtype=float)
    M, b = maps_on_grid(model, ts)
    n1 = bloch_from_angles(pair[0])
    n2 = bloch_from_angles(pair[1])
    return 0.5 * np.linalg.norm(np.einsum("kij,j->ki", M, n1 - n2), axis=1)


def backflow_intervals(times, distances, slope_tol: float = SLOPE_TOL) -> list[Interval]:
    """Maximal intervals on which the discrete slope of D exceeds ``slope_tol``.

    Endpoints are placed where the linearly interpolated slope (sampled at
    interval midpoints) crosses the threshold; ``gain`` is the summed
    increase of D over the run.
    """
    ts = np.asarray(times, dtype=float)
    d = np.asarray(distances, dtype=float)
    if ts.shape[0] < 3 or ts.shape != d.shape:
        raise DomainError("need at least three matching samples")
    dd = np.diff(d)
    slope = dd / np.diff(ts)
    mids = 0.5 * (ts[1:] + ts[:-1])
    pos = slope > slope_tol
    out = []
    i = 0
    n = pos.shape[0]
    while i < n:
        if not pos[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and pos[j + 1]:
            j += 1
        start = ts[0] if i == 0 else _cross(mids[i - 1], mids[i], slope[i - 1], slope[i], slope_tol)
        end = ts[-1] if j == n - 1 else _cross(mids[j], mids[j + 1], slope[j], slope[j + 1], slope_tol)
        out.append(Interval(float(start), float(end), float(dd[i : j + 1].sum())))
        i = j + 1
    return out


def _cross(t_a: float, t_b: float, s_a: float, s_b: float, level: float) -> float:
    if s_b == s_a:
        return 0.5 * (t_a + t_b)
    return t_a + (level - s_a) * (t_b - t_a) / (s_b - s_a)


def _backflow(distances: np.ndarray, times: np.ndarray, slope_tol: float) -> float:
    dd = np.diff(distances)
    return float(dd[dd / np.diff(times) > slope_tol].sum())


def _antipode(theta: float, phi: float) -> tuple[float, float]:
    return (math.pi - theta, (phi + math.pi) % (2 * math.pi))


def _golden_max(f: Callable[[float], float], a: float, b: float, iters: int = 30) -> tuple[float, float]:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def blp_measure(
    model,
    horizon: float,
    n_points: int = 2000,
    pair_grid: int = PAIR_GRID,
    refine: bool = True,
    exhaustive: bool = False,
    slope_tol: float = SLOPE_TOL,
) -> BLPResult:
    """Trace-distance backflow maximised over pure-state pairs.

    By default the search runs over antipodal pairs: a ``pair_grid`` squared
    (θ, φ) grid followed by one golden-section pass in θ and then φ.
    ``exhaustive`` instead scans general (non-antipodal) pure pairs on a
    coarse grid, for verification.
    """
    if not horizon > 0:
        raise DomainError(f"horizon must be > 0, got {horizon}")
    ts = np.linspace(0.0, horizon, n_points)
    M, b = maps_on_grid(model, ts)
    count = 0

    if exhaustive:
        thetas = np.linspace(0, math.pi, 7)
        phis = np.linspace(0, 2 * math.pi, 6, endpoint=False)
        states = [(float(t), float(p)) for t in thetas for p in (phis if 0 < t < math.pi else [0.0])]
        imgs = [_evolved(M, b, bloch_from_angles(s)) for s in states]
        best, best_pair = -1.0, None
        for i in range(len(states)):
            for j in range(i + 1, len(states)):
                d = 0.5 * np.linalg.norm(imgs[i] - imgs[j], axis=1)
                val = _backflow(d, ts, slope_tol)
                count += 1
                if val > best:
                    best, best_pair = val, (states[i], states[j])
        d = 0.5 * np.linalg.norm(imgs[states.index(best_pair[0])] - imgs[states.index(best_pair[1])], axis=1)
        return BLPResult(max(best, 0.0), best_pair, backflow_intervals(ts, d, slope_tol), count)

    def value(theta: float, phi: float) -> float:
        nonlocal count
        count += 1
        n = bloch_from_angles((theta, phi % (2 * math.pi)))
        d = np.linalg.norm(np.einsum("kij,j->ki", M, n), axis=1)
        return _backflow(d, ts, slope_tol)

    thetas = np.linspace(0.0, math.pi, pair_grid)
    phis = np.linspace(0.0, 2 * math.pi, pair_grid, endpoint=False)
    best, bt, bp = -1.0, 0.0, 0.0
    for th in thetas:
        for ph in phis:
            v = value(th, ph)
            if v > best:
                best, bt, bp = v, float(th), float(ph)
    if refine and best > 0:
        dth = math.pi / (pair_grid - 1)
        th, v = _golden_max(lambda x: value(x, bp), max(bt - dth, 0.0), min(bt + dth, math.pi))
        if v > best:
            best, bt = v, th
        dph = 2 * math.pi / pair_grid
        ph, v = _golden_max(lambda x: value(bt, x), bp - dph, bp + dph)
        if v > best:
            best, bp = v, ph % (2 * math.pi)
    pair = ((bt, bp), _antipode(bt, bp))
    d = np.linalg.norm(np.einsum("kij,j->ki", M, bloch_from_angles(pair[0])), axis=1)
    return BLPResult(max(best, 0.0), pair, backflow_intervals(ts, d, slope_tol), count)


# -- divisibility -------------------------------------------------------------


def rate_sign_divisibility(model, times, tol: float = RATE_TOL) -> Divisibility:
    """Divisible iff every canonical rate is >= -tol on ``times``.

    Times at which a rate diverges are skipped and listed in ``skipped``.
    """
    ts = np.asarray(times, dtype=float)
    if isinstance(model, OhmicDephasing):
        g = ohmic_rate(model, ts)
        bad = np.nonzero(g < -tol)[0]
        if bad.size:
            k = int(bad[0])
            return Divisibility(False, "rate-sign", {"rate": 3, "t": float(ts[k]), "value": float(g[k])})
        return Divisibility(True, "rate-sign")
    skipped = []
    for t in ts:
        try:
            rates = decay_rates(model, float(t))
        except SingularRateError:
            skipped.append(float(t))
            continue
        for k, r in enumerate(rates[:3]):
            if r < -tol:
                return Divisibility(False, "rate-sign", {"rate": k + 1, "t": float(t), "value": float(r)}, skipped)
    return Divisibility(True, "rate-sign", None, skipped)


def ptm_on_grid(model, times) -> np.ndarray:
    ts = np.asarray(times, dtype=float)
    M, b = maps_on_grid(model, ts)
    T = np.zeros((ts.shape[0], 4, 4))
    T[:, 0, 0] = 1.0
    T[:, 1:, 0] = b
    T[:, 1:, 1:] = M
    return T


def ptm(model, t: float) -> np.ndarray:
    """Pauli transfer matrix [[1, 0], [b, M]] of the map at time ``t``."""
    if t < 0:
        raise DomainError("t must be >= 0")
    if t == 0:
        return np.eye(4)
    return ptm_on_grid(model, [t])[0]


def intermediate_map(model, s: float, t: float) -> np.ndarray:
    """T(t) T(s)^-1, the map propagating from time s to time t."""
    if not (0 <= s <= t):
        raise DomainError(f"need 0 <= s <= t, got s={s}, t={t}")
    Ts = ptm(model, s)
    if np.linalg.cond(Ts) > MAX_COND:
        raise SingularIntermediateError("transfer matrix is not invertible", s)
    return ptm(model, t) @ np.linalg.inv(Ts)


# σ_μ^T ⊗ σ_ν for all (μ, ν)
_CHOI_BASIS = np.einsum("mab,ncd->mnacbd", PAULI.transpose(0, 2, 1), PAULI).reshape(4, 4, 4, 4)


def choi_matrices(T: np.ndarray) -> np.ndarray:
    """Choi matrices ¼ Σ T[ν, μ] σ_μ^T ⊗ σ_ν for one or a stack of PTMs."""
    T = np.asarray(T, dtype=float)
    return 0.25 * np.einsum("...nm,mnij->...ij", T, _CHOI_BASIS)


def choi_min_eigenvalue(T) -> float:
    C = choi_matrices(T)
    if np.max(np.abs(C - C.conj().T)) > 1e-10:
        raise ArithmeticError("Choi matrix is not Hermitian")
    return float(np.linalg.eigvalsh(C)[0])


def cp_divisibility_scan(model, horizon: float, n_grid: int = SCAN_GRID, tol: float = CHOI_TOL) -> Divisibility:
    """Complete positivity of T(t) T(s)^-1 over a triangular (s, t) grid.

    The witness is the grid cell with the most negative Choi eigenvalue.
    """
    if not horizon > 0:
        raise DomainError("horizon must be > 0")
    ts = np.linspace(0.0, horizon, n_grid)
    T = ptm_on_grid(model, ts)
    T[0] = np.eye(4)
    conds = np.linalg.cond(T)
    ok = conds <= MAX_COND
    skipped = [float(s) for s in ts[~ok]]
    if not ok[:-1].any():
        raise SingularIntermediateError("every grid point is ill-conditioned", float(ts[0]))
    inv = np.zeros_like(T)
    inv[ok] = np.linalg.inv(T[ok])
    i_idx, j_idx = np.triu_indices(n_grid, k=1)
    keep = ok[i_idx]
    i_idx, j_idx = i_idx[keep], j_idx[keep]
    inter = np.einsum("kab,kbc->kac", T[j_idx], inv[i_idx])
    mins = np.linalg.eigvalsh(choi_matrices(inter))[:, 0]
    k = int(np.argmin(mins))
    witness = {"s": float(ts[i_idx[k]]), "t": float(ts[j_idx[k]]), "min_choi_eigenvalue": float(mins[k])}
    if mins[k] < -tol:
        return Divisibility(False, "choi", witness, skipped)
    return Divisibility(True, "choi", None, skipped)


def nonmarkov_report(
    model,
    horizon: float,
    n_points: int = 2000,
    n_grid: int = SCAN_GRID,
    zero_tol: float = BLP_ZERO_TOL,
    choi_tol: float = CHOI_TOL,
) -> NonMarkovReport:
    """BLP measure plus both divisibility verdicts over ``[0, horizon]``.

    Backflow intervals whose gain is at or below ``zero_tol`` are dropped, and
    a measure at or below it is reported as exactly zero.
    """
    blp = blp_measure(model, horizon, n_points)
    ts = np.linspace(0.0, horizon, n_points)
    notes = [
        f"pair search: {PAIR_GRID}x{PAIR_GRID} antipodal (theta, phi) grid plus golden-section refinement",
        f"horizon {horizon:g} natural time units, {n_points} samples; (s, t) scan {n_grid}x{n_grid}",
    ]
    sing = singular_times(model, 0.0, horizon)
    if sing:
        notes.append(f"rates diverge at {len(sing)} time(s) in the window, first at t={sing[0]:.6g}")
    intervals = [i for i in blp.intervals if i.gain > zero_tol]
    measure = blp.measure if blp.measure > zero_tol else 0.0
    if measure == 0.0:
        intervals = []
    return NonMarkovReport(
        family=model.kind,
        horizon=horizon,
        blp_measure=measure,
        optimal_pair=blp.optimal_pair,
        backflow_intervals=intervals,
        divisibility=cp_divisibility_scan(model, horizon, n_grid, choi_tol),
        rate_divisibility=rate_sign_divisibility(model, ts),
        notes=notes,
    )


# -- numeric region location --------------------------------------------------


def bisect_threshold(indicator: Callable[[float], bool], lo: float, hi: float, tol: float = 1e-3) -> float:
    """Boundary between ``indicator(lo) != indicator(hi)``, located by bisection."""
    a, b = indicator(lo), indicator(hi)
    if a == b:
        raise DomainError(f"indicator does not change over [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if indicator(mid) == a:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def numeric_region(indicator: Callable[[float], bool], lo: float, hi: float, n_scan: int = 33, tol: float = 1e-3) -> list:
    """Sub-intervals of [lo, hi] where ``indicator`` holds, edges bisected."""
    xs = np.linspace(lo, hi, n_scan)
    flags = [indicator(float(x)) for x in xs]
    out = []
    k = 0
    while k < n_scan:
        if not flags[k]:
            k += 1
            continue
        j = k
        while j + 1 < n_scan and flags[j + 1]:
            j += 1
        a = float(xs[0]) if k == 0 else bisect_threshold(indicator, float(xs[k - 1]), float(xs[k]), tol)
        b = float(xs[-1]) if j == n_scan - 1 else bisect_threshold(indicator, float(xs[j]), float(xs[j + 1]), tol)
        out.append((a, b))
        k = j + 1
    return out


def divisibility_threshold(make_model: Callable[[float], object], lo: float, hi: float, horizon: float, tol: float = 1e-3) -> float:
    """Parameter value where the Choi scan verdict flips, by bisection."""
    return bisect_threshold(lambda x: not cp_divisibility_scan(make_model(x), horizon).divisible, lo, hi, tol)
