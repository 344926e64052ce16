import math

import numpy as np
import pytest

from qdyn.dynamics import (
    TimeGrid,
    evolve,
    generator,
    in_ball,
    max_deviation,
    ode_oracle_trajectory,
    trajectory,
)
from qdyn.errors import DomainError, IntegrationError, SingularRateError
from qdyn.models import (
    JaynesCummings,
    OhmicDephasing,
    PauliTan,
    PauliTanh,
    PolarizationDephasing,
    decoherence_function,
    singular_times,
)
from qdyn.qubit import bloch_from_angles

from .conftest import random_ball

JC_Z_SOUTH_T1 = -0.65545748527149044718  # frozen: Δ=0, γ_M=λ=1, t=1, n0 = south pole

TOL = 1e-9
N0 = bloch_from_angles((2 * math.pi / 3, 0.7))


def test_time_grid_validation():
    assert TimeGrid(0, 1, 5).times.tolist() == [0, 0.25, 0.5, 0.75, 1.0]
    for args in ((1, 1, 5), (-1, 1, 5), (0, 1, 1), (0, math.inf, 5)):
        with pytest.raises(DomainError):
            TimeGrid(*args)


def test_evolve_examples():
    assert evolve(OhmicDephasing(1, 3), [0, 0, 1], 5.0) == pytest.approx([0, 0, 1])
    z = evolve(JaynesCummings(1.0, 1.0, 0.0), [0, 0, -1], 1.0)
    assert z[2] == pytest.approx(JC_Z_SOUTH_T1, abs=1e-14)
    with pytest.raises(DomainError):
        evolve(OhmicDephasing(), [1, 1, 0], 1.0)


def test_south_pole_population_formula():
    m = JaynesCummings(1.0, 1.0, 0.0)
    for t in (0.5, 1.0, 3.0):
        assert evolve(m, [0, 0, -1], t)[2] == pytest.approx(1 - 2 * abs(decoherence_function(m, t)) ** 2, abs=1e-15)


def test_trajectory_starts_at_initial_state():
    tr = trajectory(PauliTanh(1.0, 0.5), N0, TimeGrid(0, 3, 31))
    assert len(tr) == 31
    np.testing.assert_array_equal(tr.states[0], N0)


def test_generator_examples():
    A, b = generator(PauliTanh(1.0, 1.0), 0.0)
    np.testing.assert_allclose(A, np.diag([-1.0, -1.0, -2.0]))
    assert not b.any()
    A, b = generator(JaynesCummings(1.0, 0.5, 0.0), 0.0)
    assert not A.any() and not b.any()
    A, b = generator(OhmicDephasing(1.0, 1.0), 1.0)
    np.testing.assert_allclose(A, np.diag([-1.0, -1.0, 0.0]), atol=1e-15)
    with pytest.raises(SingularRateError):
        generator(PauliTan(1.0, 1.0), math.pi / 2)


ORACLE_SETS = [
    OhmicDephasing(1.0, 1.0),
    OhmicDephasing(1.0, 3.0),
    JaynesCummings(1.0, 0.1, 0.0),
    JaynesCummings(1.0, 0.6, 0.5),
    PauliTanh(1.0, 1.0),
    PauliTan(1.0, 0.1),
    PolarizationDephasing(1.0, 0.3, 1.0, 1.25, math.pi / 4),
    PolarizationDephasing(1.0, 0.3, 2.0, 1.0, 0.2),
]


@pytest.mark.parametrize("model", ORACLE_SETS, ids=repr)
def test_oracle_agreement(backend, model):
    grid = TimeGrid(0, 10, 201)
    assert not singular_times(model, 0, 10)
    a = trajectory(model, N0, grid)
    b = ode_oracle_trajectory(model, N0, grid, TOL)
    assert max_deviation(a, b) <= 10 * TOL


def test_oracle_before_first_zero(backend):
    # G(t) of the strongly coupled JC model vanishes first near t = 0.7235
    m = JaynesCummings(1.0, 5.0, 0.0)
    assert singular_times(m, 0, 1)[0] == pytest.approx(0.7235, abs=1e-3)
    grid = TimeGrid(0, 0.7, 141)
    assert max_deviation(trajectory(m, N0, grid), ode_oracle_trajectory(m, N0, grid, TOL)) <= 10 * TOL


@pytest.mark.parametrize(
    "model, first_zero",
    [(JaynesCummings(1.0, 5.0, 0.0), 0.7235), (PolarizationDephasing(1.0, 0.3, 1.0, 2.0, math.pi / 4), math.pi), (PauliTan(1.0, 1.0), math.pi / 2)],
    ids=repr,
)
def test_oracle_refuses_divergent_windows(model, first_zero):
    with pytest.raises(IntegrationError) as exc:
        ode_oracle_trajectory(model, N0, TimeGrid(0, 10, 101))
    assert exc.value.t == pytest.approx(first_zero, abs=1e-3)


@pytest.mark.parametrize("model", ORACLE_SETS + [JaynesCummings(1.0, 5.0, 0.0), PauliTan(1.0, 2.0)], ids=repr)
def test_trajectories_stay_in_ball(model, rng):
    for n0 in random_ball(rng, 10):
        assert in_ball(trajectory(model, n0, TimeGrid(0, 10, 501)))


def test_degenerate_polarization_conserves_length():
    m = PolarizationDephasing(1.0, 0.0, 1.5, 1.5, 0.3)
    tr = trajectory(m, N0, TimeGrid(0, 20, 401))
    np.testing.assert_allclose(np.linalg.norm(tr.states, axis=1), 1.0, atol=1e-14)


@pytest.mark.parametrize("model", [PauliTanh(1.0, 0.0), PauliTan(0.7, 0.0)], ids=repr)
def test_constant_rate_composition(model, rng):
    # only the ω = 0 reductions are semigroups
    for n0 in random_ball(rng, 5):
        for s, t in ((0.3, 1.0), (1.2, 4.0)):
            np.testing.assert_allclose(evolve(model, evolve(model, n0, s), t - s), evolve(model, n0, t), atol=1e-14)


def test_composition_fails_without_constant_rates():
    m = PauliTanh(1.0, 1.0)
    n0 = np.array([0.5, 0.5, 0.5])
    assert np.abs(evolve(m, evolve(m, n0, 1.0), 1.0) - evolve(m, n0, 2.0)).max() > 1e-3


def test_oracle_rejects_bad_tol():
    with pytest.raises(DomainError):
        ode_oracle_trajectory(OhmicDephasing(), N0, TimeGrid(0, 1, 3), 0.0)
