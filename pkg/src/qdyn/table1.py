"""Reproduction of the six-row summary table of initial speeds and regions.

Each row compares the closed-form v(0)² against the finite-difference
curvature, checks the tabulated Markovianity verdicts numerically, and
checks the monotonicity claim. Failures are recorded per check; nothing
raises.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .config import UNITS_CONVENTION
from .errors import QdynError
from .models import (
    JaynesCummings,
    OhmicDephasing,
    PauliTan,
    PauliTanh,
    PolarizationDephasing,
    closed_form_term_scale,
    initial_speed_squared_closed_form,
    jc_detuned_speed_squared,
)
from .nonmarkov import (
    blp_measure,
    cp_divisibility_scan,
    divisibility_threshold,
    numeric_region,
    rate_sign_divisibility,
)
from .speed import initial_speed_scan, relative_error, scan_values, speed_squared_fd

THETAS = (math.pi / 6, math.pi / 2, 5 * math.pi / 6)


@dataclass(frozen=True)
class Table1Tolerances:
    fd_rtol: float = 1e-3
    h: float = 1e-4
    threshold_abs: float = 0.02
    blp_positive: float = 1e-3
    blp_zero: float = 1e-8
    choi: float = 1e-10
    identity: float = 1e-12
    horizon: float = 10.0
    threshold_horizon: float = 20.0
    scan_points: int = 64


@dataclass
class Check:
    name: str
    claimed: object
    computed: object
    ok: bool
    detail: str = ""


@dataclass
class RowReport:
    row: int
    label: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        return {"row": self.row, "label": self.label, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}


@dataclass
class Table1Report:
    rows: list
    tolerances: Table1Tolerances

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "convention": UNITS_CONVENTION,
            "passed": self.passed,
            "tolerances": asdict(self.tolerances),
            "rows": [r.to_dict() for r in self.rows],
        }

    def to_text(self) -> str:
        lines = [f"# units: {UNITS_CONVENTION}", ""]
        for r in self.rows:
            n_ok = sum(c.ok for c in r.checks)
            lines.append(f"[{'PASS' if r.passed else 'FAIL'}] row {r.row} {r.label}: {n_ok}/{len(r.checks)} checks")
            for c in r.checks:
                if not c.ok:
                    lines.append(f"    FAIL {c.name}: claimed {c.claimed}, computed {c.computed} {c.detail}".rstrip())
        lines.append("")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _guarded(row: RowReport, name: str, claimed, fn: Callable[[], tuple]) -> None:
    # fn returns (computed, ok) or (computed, ok, detail)
    try:
        res = fn()
    except (QdynError, ArithmeticError) as exc:
        row.checks.append(Check(name, claimed, None, False, f"{type(exc).__name__}: {exc}"))
        return
    row.checks.append(Check(name, claimed, *res))


def _speed_checks(row, models, closed_form, tol: Table1Tolerances) -> None:
    for label, m in models:
        for th in THETAS:
            cf = closed_form(m, th)

            def fd_check(m=m, th=th, cf=cf):
                fd = speed_squared_fd(m, (th, 0.0), 0.0, tol.h).v_squared
                err = relative_error(fd, cf, closed_form_term_scale(m, th))
                return fd, err <= tol.fd_rtol, f"rel_err={err:.3g}"

            _guarded(row, f"v0^2 {label} theta={th:.4f}", cf, fd_check)


def _blp_check(row, name, model, positive: bool, tol: Table1Tolerances) -> None:
    def f():
        n = blp_measure(model, tol.horizon).measure
        ok = n > tol.blp_positive if positive else n <= tol.blp_zero
        return n, ok

    _guarded(row, name, f"> {tol.blp_positive}" if positive else f"<= {tol.blp_zero}", f)


def _choi_check(row, name, model, indivisible: bool, tol: Table1Tolerances, horizon=None) -> None:
    def f():
        v = cp_divisibility_scan(model, horizon or tol.horizon, tol=tol.choi)
        return ("indivisible" if not v.divisible else "divisible"), (not v.divisible) == indivisible, str(v.witness or "")

    _guarded(row, name, "indivisible" if indivisible else "divisible", f)


def _mono_check(row, name, template, lo, hi, expected, tol: Table1Tolerances, open_lower=False) -> None:
    def f():
        rep = initial_speed_scan(template, template.driving, scan_values(lo, hi, tol.scan_points, open_lower), h=tol.h)
        return rep.verdict, rep.verdict == expected and rep.cross_checks_ok

    _guarded(row, name, expected, f)


def _row_ohmic(cf, tol) -> RowReport:
    row = RowReport(1, "ohmic dephasing, driven by s")
    _speed_checks(row, [(f"s={s}", OhmicDephasing(1.0, s)) for s in (0.5, 1.0, 2.0, 3.0, 4.0)], cf, tol)
    ts = np.arange(1, 50001) * 1e-3
    for s, indiv in ((2.0, False), (2.05, True)):
        def f(s=s, indiv=indiv):
            v = rate_sign_divisibility(OhmicDephasing(1.0, s), ts)
            return ("indivisible" if not v.divisible else "divisible"), (not v.divisible) == indiv, str(v.witness or "")

        _guarded(row, f"rate-sign s={s}", "indivisible" if indiv else "divisible", f)
    _choi_check(row, "choi s=3", OhmicDephasing(1.0, 3.0), True, tol)
    _blp_check(row, "blp s=1", OhmicDephasing(1.0, 1.0), False, tol)
    _blp_check(row, "blp s=3", OhmicDephasing(1.0, 3.0), True, tol)
    _blp_check(row, "blp s=4", OhmicDephasing(1.0, 4.0), True, tol)
    _mono_check(row, "monotone in s on [2.05, 5]", OhmicDephasing(1.0, 3.0), 2.05, 5.0, "strictly-increasing", tol)
    return row


def _row_polarization(cf, tol) -> RowReport:
    row = RowReport(2, "polarization dephasing, driven by xi")
    base = dict(dn=1.0, sigma=0.3, omega1=1.0, omega2=2.0)
    _speed_checks(row, [(f"xi={x:.4f}", PolarizationDephasing(xi=x, **base)) for x in (0.0, math.pi / 4, math.pi / 2)], cf, tol)

    def region(kind):
        def f():
            if kind == "backflow":
                ind = lambda x: blp_measure(PolarizationDephasing(xi=x, **base), tol.horizon).measure > tol.blp_zero
            else:
                ind = lambda x: not cp_divisibility_scan(PolarizationDephasing(xi=x, **base), tol.horizon, tol=tol.choi).divisible
            reg = numeric_region(ind, 0.0, math.pi / 2)
            return [list(r) for r in reg], True, "resolved numerically"

        return f

    _guarded(row, "backflow xi-region", "numeric", region("backflow"))
    _guarded(row, "indivisible xi-region", "numeric", region("indivisible"))
    _mono_check(row, "monotone in xi, omega2 > omega1", PolarizationDephasing(**base), 0.0, math.pi / 2, "strictly-increasing", tol)
    swapped = dict(base, omega1=2.0, omega2=1.0)
    _mono_check(row, "monotone in xi, omega1 > omega2", PolarizationDephasing(**swapped), 0.0, math.pi / 2, "strictly-decreasing", tol)
    return row


def _row_jc(cf, tol) -> RowReport:
    row = RowReport(3, "jaynes-cummings on resonance, driven by gamma_m")
    _speed_checks(row, [(f"gamma_m={g}", JaynesCummings(1.0, g, 0.0)) for g in (0.1, 0.5, 1.0, 5.0)], cf, tol)

    def ident():
        worst = 0.0
        for lam in (0.5, 1.0, 2.0):
            for g in np.linspace(0.0, 5.0, 11):
                for th in np.linspace(0.0, math.pi, 7):
                    m = JaynesCummings(lam, float(g), 0.0)
                    a = initial_speed_squared_closed_form(m, th)
                    b = jc_detuned_speed_squared(m, th)
                    worst = max(worst, abs(a - b) / max(1.0, abs(a)))
        return worst, worst <= tol.identity

    _guarded(row, "resonant row equals detuned row at delta=0", f"<= {tol.identity}", ident)

    def threshold():
        x = divisibility_threshold(lambda g: JaynesCummings(1.0, g, 0.0), 0.1, 2.0, tol.threshold_horizon)
        return x, abs(x - 0.5) <= tol.threshold_abs, "lam=1, bisection on the Choi scan"

    _guarded(row, "divisibility threshold gamma_m/lam", "0.5 +/- 0.02", threshold)
    _choi_check(row, "choi gamma_m=0.4", JaynesCummings(1.0, 0.4, 0.0), False, tol, tol.threshold_horizon)
    _choi_check(row, "choi gamma_m=2", JaynesCummings(1.0, 2.0, 0.0), True, tol, tol.threshold_horizon)
    _blp_check(row, "blp gamma_m=0.1", JaynesCummings(1.0, 0.1, 0.0), False, tol)
    _blp_check(row, "blp gamma_m=5", JaynesCummings(1.0, 5.0, 0.0), True, tol)
    _mono_check(row, "monotone in gamma_m on [0.6, 5]", JaynesCummings(1.0, 1.0, 0.0), 0.6, 5.0, "strictly-increasing", tol)
    return row


def _row_jc_detuned(cf, tol) -> RowReport:
    row = RowReport(4, "jaynes-cummings detuned (delta=0.5)")
    _speed_checks(row, [("gamma_m=1 delta=0.5", JaynesCummings(1.0, 1.0, 0.5))], cf, tol)

    def region():
        ind = lambda g: not cp_divisibility_scan(JaynesCummings(1.0, g, 0.5), tol.threshold_horizon, tol=tol.choi).divisible
        reg = numeric_region(ind, 0.05, 3.0, n_scan=30)
        # with W = gamma_m lam/2 + delta^2/4, 2W < delta makes |G| grow, so no channel there
        g_min = 0.5 - 0.5**2 / 2.0
        return [list(r) for r in reg], True, f"resolved numerically; |G|>1 (non-physical) for gamma_m < {g_min:.4g}"

    _guarded(row, "indivisible gamma_m-region", "numeric", region)
    return row


def _row_pauli_tanh(cf, tol) -> RowReport:
    row = RowReport(5, "pauli channel, tanh rate, driven by omega")
    _speed_checks(row, [(f"omega={w}", PauliTanh(1.0, w)) for w in (0.0, 0.5, 1.0)], cf, tol)
    _choi_check(row, "choi omega=0", PauliTanh(1.0, 0.0), False, tol)
    for w in (0.25, 0.5, 1.0):
        _choi_check(row, f"choi omega={w}", PauliTanh(1.0, w), True, tol)
        _blp_check(row, f"blp omega={w}", PauliTanh(1.0, w), False, tol)
    _mono_check(row, "monotone in omega on (0, 1]", PauliTanh(1.0, 0.5), 0.0, 1.0, "strictly-decreasing", tol, open_lower=True)
    return row


def _row_pauli_tan(cf, tol) -> RowReport:
    row = RowReport(6, "pauli channel, tan rate, driven by omega")
    _speed_checks(row, [(f"omega={w}", PauliTan(1.0, w)) for w in (0.0, 1.0, 2.0)], cf, tol)
    _choi_check(row, "choi omega=0", PauliTan(1.0, 0.0), False, tol)
    _blp_check(row, "blp omega=0", PauliTan(1.0, 0.0), False, tol)
    for w in (0.5, 1.0, 2.0):
        _choi_check(row, f"choi omega={w}", PauliTan(1.0, w), True, tol)
    _blp_check(row, "blp omega=2", PauliTan(1.0, 2.0), True, tol)
    _mono_check(row, "monotone in omega on (0, 3]", PauliTan(1.0, 1.0), 0.0, 3.0, "strictly-increasing", tol, open_lower=True)
    return row


def table1_report(tolerances: Table1Tolerances | None = None, closed_form=initial_speed_squared_closed_form) -> Table1Report:
    """Run every row at the fixed parameter sets.

    Args:
        tolerances: overrides of the default check tolerances.
        closed_form: v(0)² formula to test against the finite differences;
            injectable for fault-injection checks.
    """
    tol = tolerances or Table1Tolerances()
    rows = [
        build(closed_form, tol)
        for build in (_row_ohmic, _row_polarization, _row_jc, _row_jc_detuned, _row_pauli_tanh, _row_pauli_tan)
    ]
    return Table1Report(rows, tol)
