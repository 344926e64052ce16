import math

import numpy as np
import pytest

from qdyn import _kernels

_CRITERIA: list[str] = []


@pytest.fixture(params=["cython", "python"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend."""
    if request.param == "cython":
        if _kernels._ckernels is None:
            pytest.skip("compiled kernels not built")
    else:
        monkeypatch.setattr(_kernels, "_ckernels", None)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
        _CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)


def random_ball(rng, n):
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.uniform(size=(n, 1)) ** (1 / 3)


def random_sphere(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


THETAS = (math.pi / 6, math.pi / 2, 5 * math.pi / 6)
