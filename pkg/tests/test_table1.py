import json

import pytest

from qdyn.models import OhmicDephasing, initial_speed_squared_closed_form
from qdyn.table1 import Table1Tolerances, table1_report


@pytest.fixture(scope="module")
def report():
    return table1_report()


def test_report_structure(report):
    assert [r.row for r in report.rows] == [1, 2, 3, 4, 5, 6]
    d = report.to_dict()
    json.dumps(d)
    assert d["passed"] == report.passed
    assert len(d["rows"]) == 6 and all(r["checks"] for r in d["rows"])
    text = report.to_text()
    assert text.startswith("# units:")
    assert text.count("[PASS]") + text.count("[FAIL]") == 6


def test_every_fd_check_passes(report):
    fd = [c for r in report.rows for c in r.checks if c.name.startswith("v0^2")]
    assert len(fd) == 15 + 9 + 12 + 3 + 9 + 9
    assert all(c.ok for c in fd), [c for c in fd if not c.ok]


def test_only_the_jc_threshold_check_fails(report):
    # with W = γ_M λ/2, G oscillates from γ_M = λ, not λ/2, so the bisection lands near 1
    failing = [(r.row, c.name) for r in report.rows for c in r.checks if not c.ok]
    assert failing == [(3, "divisibility threshold gamma_m/lam")]
    (check,) = [c for c in report.rows[2].checks if not c.ok]
    assert check.computed == pytest.approx(1.0, abs=0.05)
    assert "FAIL" in report.to_text() and "gamma_m/lam" in report.to_text()


def test_fault_injection_breaks_ohmic_row():
    def perturbed(model, theta):
        v = initial_speed_squared_closed_form(model, theta)
        return 1.01 * v if isinstance(model, OhmicDephasing) else v

    rep = table1_report(closed_form=perturbed)
    ohmic = rep.rows[0]
    fd = [c for c in ohmic.checks if c.name.startswith("v0^2")]
    assert fd and not any(c.ok for c in fd)
    assert not ohmic.passed and not rep.passed
    # other rows untouched
    assert all(c.ok for c in rep.rows[1].checks if c.name.startswith("v0^2"))


def test_tight_fd_tolerance_hits_truncation_floor():
    rep = table1_report(Table1Tolerances(fd_rtol=1e-9))
    fd = [c for r in rep.rows for c in r.checks if c.name.startswith("v0^2")]
    assert not all(c.ok for c in fd)
    assert not rep.passed
