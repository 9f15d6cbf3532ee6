"""Disc/half-plane points, hyperbolic distance and Cayley maps."""
import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loewnerflow import (BoundaryPoint, ConfigError, DegenerateInput, DiscPoint, HalfPlanePoint,
                         cayley, hyperbolic_distance, parse_complex)
from loewnerflow.geometry import cayley_forward, cayley_inverse, format_complex, rho


@st.composite
def disc_points(draw, r_max=0.999):
    r = draw(st.floats(0.0, r_max))
    theta = draw(st.floats(0.0, 2 * math.pi))
    return r * cmath.exp(1j * theta)


@st.composite
def circle_points(draw):
    return cmath.exp(1j * draw(st.floats(0.0, 2 * math.pi)))


def automorphism(a, rot):
    return lambda z: rot * (z - a) / (1 - a.conjugate() * z)


AUTOMORPHISMS = [automorphism(0.2, 1), automorphism(0.5j, 1j), automorphism(-0.3 + 0.4j, -1),
                 automorphism(0.0, cmath.exp(0.7j))]


def test_distance_examples():
    assert hyperbolic_distance(0, 0) == 0
    assert hyperbolic_distance(0, 0.5) == pytest.approx(0.5493061, abs=1e-7)
    m = AUTOMORPHISMS[0]
    assert hyperbolic_distance(0.3, -0.3) == pytest.approx(hyperbolic_distance(m(0.3), m(-0.3)),
                                                           abs=1e-12)


def test_cayley_examples():
    assert cayley("disc_to_halfplane", 1, 0).value == 1
    assert cayley("disc_to_halfplane", 1, 0.5).value == pytest.approx(3)
    assert cayley("halfplane_to_disc", 1, 3).value == pytest.approx(0.5)


def test_cayley_errors():
    with pytest.raises(ValueError):
        cayley("disc_to_halfplane", 1, 1.0)  # not inside the disc
    with pytest.raises(ValueError):
        cayley("sideways", 1, 0.1)
    with pytest.raises(ValueError):
        cayley("halfplane_to_disc", 1, -1.0)
    # the pole itself can only be reached through the unchecked helper
    with pytest.raises(ZeroDivisionError):
        cayley_forward(1.0, 1.0)


def test_degenerate_forward_pole():
    # a disc point equal to tau cannot exist, but tau snapping to the circle can
    with pytest.raises((DegenerateInput, ValueError)):
        cayley("disc_to_halfplane", 1 + 1e-15, 1.0)


def test_point_types_validate():
    with pytest.raises(ValueError):
        DiscPoint(1.0)
    with pytest.raises(ValueError):
        HalfPlanePoint(0.0)
    with pytest.raises(ValueError):
        BoundaryPoint(0.5)
    assert abs(BoundaryPoint(1 + 5e-15).value) == 1.0


@pytest.mark.parametrize("text, value", [("0.5+0i", 0.5), ("0.5-2i", 0.5 - 2j),
                                         ("-1e-3+2.5e1i", -1e-3 + 25j), (".5+.25i", 0.5 + 0.25j)])
def test_parse_complex(text, value):
    assert parse_complex(text) == value
    assert parse_complex(format_complex(value)) == value


@pytest.mark.parametrize("text", ["0.5", "1+i", "abc", "0.5+0j", "1 + 2i", ""])
def test_parse_complex_rejects(text):
    with pytest.raises(ConfigError):
        parse_complex(text)


def test_round_trip_bulk():
    rng = np.random.default_rng(3)
    z = np.sqrt(rng.random(1000)) * 0.999 * np.exp(2j * np.pi * rng.random(1000))
    tau = np.exp(2j * np.pi * rng.random(1000))
    assert np.max(np.abs(cayley_inverse(tau, cayley_forward(tau, z)) - z)) < 1e-12


@given(disc_points(0.99), circle_points())
def test_forward_lands_in_halfplane(z, tau):
    w = cayley("disc_to_halfplane", tau, z)
    assert w.value.real > 0
    assert abs(cayley("halfplane_to_disc", tau, w).value - z) < 1e-12


@given(disc_points(0.95), disc_points(0.95), st.sampled_from(AUTOMORPHISMS))
def test_distance_invariance(a, b, m):
    assert abs(rho(a, b) - rho(m(a), m(b))) < 1e-12 * max(1.0, float(rho(a, b)))


@settings(max_examples=50)
@given(disc_points(0.99), disc_points(0.99))
def test_distance_symmetric_and_zero_iff_equal(a, b):
    assert hyperbolic_distance(a, b) == pytest.approx(hyperbolic_distance(b, a), abs=1e-12)
    assert hyperbolic_distance(a, a) == 0
    if a != b:
        assert hyperbolic_distance(a, b) > 0
