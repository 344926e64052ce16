import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdyn.errors import DomainError
from qdyn.qubit import (
    PureStateAngles,
    bloch_from_angles,
    bloch_from_density,
    density_from_bloch,
    fidelity,
    fidelity_matrix_oracle,
    trace_distance,
)

from .conftest import random_ball, random_sphere


@pytest.mark.parametrize(
    "angles, expected",
    [
        ((0.0, 0.0), (0, 0, 1)),
        ((math.pi, 0.0), (0, 0, -1)),
        ((math.pi / 2, math.pi / 2), (0, -1, 0)),
        ((math.pi / 2, 0.0), (1, 0, 0)),
    ],
)
def test_bloch_from_angles(angles, expected):
    np.testing.assert_allclose(bloch_from_angles(angles), expected, atol=1e-15)


@pytest.mark.parametrize("angles", [(-0.1, 0.0), (math.pi + 1e-9, 0.0), (1.0, 2 * math.pi), (1.0, -1e-3)])
def test_bloch_from_angles_rejects_out_of_range(angles):
    with pytest.raises(DomainError):
        bloch_from_angles(angles)


def test_pure_angles_unit_norm(rng):
    for th, ph in zip(rng.uniform(0, math.pi, 200), rng.uniform(0, 2 * math.pi, 200)):
        assert abs(np.linalg.norm(bloch_from_angles(PureStateAngles(th, ph))) - 1) < 1e-12


@pytest.mark.parametrize(
    "n, rho",
    [
        ((0, 0, 1), [[1, 0], [0, 0]]),
        ((0, 0, 0), [[0.5, 0], [0, 0.5]]),
        ((1, 0, 0), [[0.5, 0.5], [0.5, 0.5]]),
    ],
)
def test_density_from_bloch(n, rho):
    np.testing.assert_allclose(density_from_bloch(n), rho, atol=1e-15)


def test_density_invariants_and_roundtrip(rng):
    for n in random_ball(rng, 100):
        rho = density_from_bloch(n)
        assert abs(np.trace(rho) - 1) < 1e-12
        assert np.max(np.abs(rho - rho.conj().T)) < 1e-12
        assert np.linalg.eigvalsh(rho).min() > -1e-12
        np.testing.assert_allclose(bloch_from_density(rho), n, atol=1e-14)


def test_density_rejects_outside_ball():
    with pytest.raises(DomainError):
        density_from_bloch((1.0 + 1e-6, 0, 0))
    # rounding-level overshoot is tolerated
    density_from_bloch((1.0 + 1e-12, 0, 0))


def test_pure_state_convention_is_conjugated_projector(rng):
    # the minus sign on y makes rho the complex conjugate of |psi><psi| for
    # |psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
    for th, ph in zip(rng.uniform(0, math.pi, 20), rng.uniform(0, 2 * math.pi, 20)):
        psi = np.array([math.cos(th / 2), np.exp(1j * ph) * math.sin(th / 2)])
        rho = density_from_bloch(bloch_from_angles((th, ph)))
        np.testing.assert_allclose(rho, np.outer(psi, psi.conj()).conj(), atol=1e-14)


@pytest.mark.parametrize(
    "n1, n2, expected",
    [
        ((0, 0, 1), (0, 0, 1), 1.0),
        ((0, 0, 1), (0, 0, -1), 0.0),
        ((1, 0, 0), (0, 0, 0), 0.5),
        ((0, 0, 0), (0, 0, 0), 1.0),
    ],
)
def test_fidelity_examples(n1, n2, expected):
    assert fidelity(n1, n2) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    "r1, r2, expected",
    [
        (np.diag([1, 0]), np.diag([1, 0]), 1.0),
        (np.diag([1, 0]), np.diag([0, 1]), 0.0),
        (np.diag([1, 0]), np.diag([0.5, 0.5]), 0.5),
    ],
)
def test_matrix_oracle_examples(r1, r2, expected):
    assert fidelity_matrix_oracle(r1, r2) == pytest.approx(expected, abs=1e-14)


def test_matrix_oracle_rejects_non_psd():
    with pytest.raises(DomainError):
        fidelity_matrix_oracle(np.diag([1.2, -0.2]), np.diag([1, 0]))
    with pytest.raises(DomainError):
        fidelity_matrix_oracle(np.array([[0.5, 0.1], [0.2, 0.5]]), np.diag([1, 0]))


def test_fidelity_agrees_with_matrix_oracle(rng):
    a, b = random_ball(rng, 2000), random_ball(rng, 2000)
    err = max(abs(fidelity(x, y) - fidelity_matrix_oracle(density_from_bloch(x), density_from_bloch(y))) for x, y in zip(a, b))
    assert err < 1e-10


def test_fidelity_symmetric_and_pure_relation(rng):
    a, b = random_sphere(rng, 500), random_sphere(rng, 500)
    for x, y in zip(a, b):
        assert fidelity(x, y) == pytest.approx(fidelity(y, x), abs=1e-15)
        assert fidelity(x, y) + trace_distance(x, y) ** 2 == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize(
    "n1, n2, expected",
    [((0, 0, 1), (0, 0, -1), 1.0), ((0.3, 0.1, 0.2), (0.3, 0.1, 0.2), 0.0), ((0, 0, 1), (0, 0, 0), 0.5)],
)
def test_trace_distance_examples(n1, n2, expected):
    assert trace_distance(n1, n2) == pytest.approx(expected, abs=1e-15)


def test_trace_distance_triangle(rng):
    a, b, c = (random_ball(rng, 300) for _ in range(3))
    for x, y, z in zip(a, b, c):
        d = trace_distance(x, z)
        assert 0.0 <= d <= 1.0
        assert d <= trace_distance(x, y) + trace_distance(y, z) + 1e-15


def test_trace_distance_matches_matrix_norm(rng):
    for x, y in zip(random_ball(rng, 50), random_ball(rng, 50)):
        ev = np.linalg.eigvalsh(density_from_bloch(x) - density_from_bloch(y))
        assert trace_distance(x, y) == pytest.approx(0.5 * np.abs(ev).sum(), abs=1e-14)


# sqrt(1 - |n|^2) turns rounding at the sphere into ~1e-8 differences, so the
# tight comparison is made away from it; pure pairs are checked separately
ball = st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: v[0] ** 2 + v[1] ** 2 + v[2] ** 2 <= 1 - 1e-6)


@settings(max_examples=300, deadline=None)
@given(ball, ball)
def test_fidelity_property(x, y):
    f = fidelity(x, y)
    assert 0.0 <= f <= 1.0
    assert f == pytest.approx(fidelity_matrix_oracle(density_from_bloch(x), density_from_bloch(y)), abs=1e-10)


def test_pure_pairs_against_oracle(rng):
    a, b = random_sphere(rng, 500), random_sphere(rng, 500)
    for x, y in zip(a, b):
        exact = 0.5 * (1 + x @ y)
        assert fidelity(x, y) == pytest.approx(exact, abs=1e-15)
        assert fidelity_matrix_oracle(density_from_bloch(x), density_from_bloch(y)) == pytest.approx(exact, abs=1e-7)
