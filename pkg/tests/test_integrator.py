"""Evolution families: the Runge-Kutta solver, derivatives, grids and the Picard oracle."""
import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loewnerflow import (BerksonPortaData, ContractionFailure, EvolutionFamilyHandle,
                         NumericalFailure, SolverOptions, chordal_field, compose_bp,
                         constant_signal, evolve, evolve_grid, evolve_with_derivative,
                         halfplane_evolve, node_signal, partial_s, picard_oracle,
                         polynomial_field, radial_p)
from loewnerflow.errors import ConfigError
from loewnerflow.herglotz import HalfPlaneField

import oracles

LINEAR = EvolutionFamilyHandle(polynomial_field([0, -1]))
HYPERBOLIC = EvolutionFamilyHandle(polynomial_field([1, 0, -1]))
KOEBE = EvolutionFamilyHandle(compose_bp(BerksonPortaData(0, radial_p(constant_signal(1)))))
ZERO = EvolutionFamilyHandle(polynomial_field([0]))


def test_linear_examples():
    assert evolve(LINEAR, 0.5, 0, 1) == pytest.approx(0.1839397, abs=1e-7)
    assert evolve(LINEAR, 0.5, 1, 1) == 0.5
    assert evolve_with_derivative(LINEAR, 0.3j, 0, 1)[1] == pytest.approx(0.3678794, abs=1e-7)
    assert evolve_with_derivative(KOEBE, 0.2, 0.4, 0.4) == (0.2, 1)


def test_koebe_examples():
    assert evolve(KOEBE, 0.3, 0, 0.5) == pytest.approx(0.13990, abs=1e-5)
    assert abs(evolve(KOEBE, 0.3, 0, 0.5) - oracles.koebe_radial(0.3, 0.5)) < 1e-10
    d = evolve_with_derivative(KOEBE, 0.0, 0, 0.5)[1]
    assert abs(d - math.exp(-0.5)) < 1e-9


@pytest.mark.parametrize("z", [-0.6, -0.2, 0.1, 0.45, 0.8])
@pytest.mark.parametrize("t", [0.1, 1.0, 3.0])
def test_koebe_against_bisection(z, t):
    assert abs(evolve(KOEBE, z, 0, t) - oracles.koebe_radial(z, t)) < 1e-9


def test_hyperbolic_matches_tanh():
    assert evolve(HYPERBOLIC, 0, 0, 0.3) == pytest.approx(0.2913126, abs=1e-7)
    for z in (0.3j, -0.5 + 0.2j):
        assert abs(evolve(HYPERBOLIC, z, 0.2, 1.4) - oracles.tanh_flow(z, 1.2)) < 1e-9


def test_partial_s():
    assert partial_s(LINEAR, 0.5, 0.0, 1.0) == pytest.approx(0.5 * math.exp(-1), abs=1e-9)
    assert partial_s(LINEAR, 0.5, 1.0, 1.0 + 1e-9) == pytest.approx(0.5, abs=1e-8)
    eps = 1e-5
    fd = (evolve(KOEBE, 0.3, 0.2 + eps, 0.5) - evolve(KOEBE, 0.3, 0.2 - eps, 0.5)) / (2 * eps)
    assert abs(partial_s(KOEBE, 0.3, 0.2, 0.5) - fd) < 1e-6
    with pytest.raises(ValueError):
        partial_s(LINEAR, 0.5, 1.0, 1.0)


def test_grid_examples():
    pts = [0.1, 0.2j, -0.3]
    res = evolve_grid(LINEAR, pts, 0.5, 1.5)
    assert np.allclose(res.values, np.array(pts) * math.exp(-1), atol=1e-12)
    assert len(evolve_grid(LINEAR, [], 0, 1)) == 0
    circle = 0.5 * np.exp(2j * np.pi * np.arange(100) / 100)
    image = evolve_grid(KOEBE, circle, 0, 0.5)
    assert not image.failures
    assert np.max(np.abs(image.values)) < 1


def test_zero_field_is_identity():
    z = np.array([0.1, -0.7j, 0.95])
    w, v = ZERO.evolve_with_derivative_array(z, 0, 3)
    assert np.array_equal(w, z) and np.all(v == 1)


def test_time_and_domain_errors():
    with pytest.raises(ValueError):
        evolve(LINEAR, 0.5, 1, 0.5)
    with pytest.raises(ValueError):
        evolve(LINEAR, 1.2, 0, 1)
    with pytest.raises(ConfigError):
        SolverOptions(rel_tol=0)


def test_escaping_flow_fails_but_grid_keeps_going():
    expanding = EvolutionFamilyHandle(polynomial_field([0, 1]))
    with pytest.raises(NumericalFailure):
        evolve(expanding, 0.5, 0, 2)
    res = evolve_grid(expanding, [0.01, 0.9], 0, 1)
    assert set(res.failures) == {1}
    assert res.values[0] == pytest.approx(0.01 * math.e, rel=1e-9)
    assert np.isnan(res.values[1])


def test_steps_do_not_cross_breakpoints():
    G = compose_bp(BerksonPortaData(0, radial_p(node_signal([(0, 1), (0.3, -1), (0.71, 1j)]))))
    _, traj = EvolutionFamilyHandle(G).evolve(0.4, 0, 1, trajectory=True)
    for b in (0.3, 0.71):
        assert b in traj.times
    assert traj.records()[0] == {"t": 0.0, "z": [0.4, 0.0]}


def test_trajectory_dense_output_and_simpson():
    _, traj = KOEBE.evolve(0.3, 0, 1, trajectory=True)
    for i in range(len(traj.dense)):
        assert abs(traj.at_fraction(i, 1.0) - traj.points[i + 1]) < 1e-12
    # int_0^1 2 xi dxi = 1
    assert traj.simpson(lambda xi, w, a: 2 * xi) == pytest.approx(1, abs=1e-13)


def test_homogeneous_handle_shifts_time():
    h = EvolutionFamilyHandle(polynomial_field([1, 0, -1]), homogeneous=True)
    assert h.evolve(0.1, 5.0, 5.4) == pytest.approx(oracles.tanh_flow(0.1, 0.4), abs=1e-10)
    _, traj = h.evolve(0.1, 5.0, 5.4, trajectory=True)
    assert traj.times[0] == 5.0 and traj.times[-1] == pytest.approx(5.4)


def test_halfplane_examples():
    P = chordal_field(constant_signal(0))
    assert halfplane_evolve(P, 1, 0, 1) == pytest.approx(math.sqrt(3), abs=1e-7)
    w = 0.1 + 2j
    assert abs(halfplane_evolve(P, w, 0, 1) - oracles.chordal_zero(w, 1)) < 1e-9
    still = HalfPlaneField(lambda w, t, a=None: 0 * w, "zero")
    assert halfplane_evolve(still, 2 + 1j, 0, 4) == 2 + 1j
    with pytest.raises(ValueError):
        halfplane_evolve(P, -1, 0, 1)


def test_picard_examples():
    G = polynomial_field([0, -1])
    assert picard_oracle(G, 0.5, 0, 0.1, 30) == pytest.approx(0.4524187, abs=1e-7)
    assert picard_oracle(G, 0.5, 0, 0.1, 0) == 0.5
    hyp = polynomial_field([1, 0, -1])
    assert abs(picard_oracle(hyp, 0, 0, 0.1, 30) - math.tanh(0.1)) < 1e-9


def test_picard_refuses_long_windows():
    with pytest.raises(ContractionFailure):
        picard_oracle(polynomial_field([0, -1]), 0.5, 0, 2.0, 30)
    with pytest.raises(ContractionFailure):
        picard_oracle(polynomial_field([0, 0, 5]), 0.9, 0, 0.5, 30)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 0.95), st.floats(0, 2 * math.pi), st.floats(0, 2), st.floats(0, 2))
def test_linear_flow_closed_form(r, theta, s, dt):
    z = r * cmath.exp(1j * theta)
    assert abs(evolve(LINEAR, z, s, s + dt) - oracles.linear(z, s, s + dt)) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 0.9), st.floats(0, 2 * math.pi), st.floats(0, 1.5))
def test_koebe_invariant_property(r, theta, t):
    z = r * cmath.exp(1j * theta)
    w = evolve(KOEBE, z, 0, t)
    assert abs(oracles.koebe_invariant(w) - math.exp(-t) * oracles.koebe_invariant(z)) < 1e-9
    assert abs(w) <= abs(z) + 1e-12  # Schwarz lemma: phi(0) = 0
