"""Unit disc and right half-plane: points, hyperbolic distance, Cayley maps.

Array-valued helpers (``pseudo_hyperbolic``, ``cayley_forward``, ...) accept
scalars or numpy arrays and do no validation; they are the building blocks
used by the integrator.  The typed entry points (``hyperbolic_distance``,
``cayley``) validate their inputs.
"""
import re
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateInput

BOUNDARY_SNAP = 1e-14


@dataclass(frozen=True)
class DiscPoint:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not np.isfinite(v) or abs(v) >= 1.0:
            raise ValueError(f"{v!r} is not inside the unit disc")
        object.__setattr__(self, "value", v)

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class HalfPlanePoint:
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not np.isfinite(v) or v.real <= 0.0:
            raise ValueError(f"{v!r} is not in the right half-plane")
        object.__setattr__(self, "value", v)

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class BoundaryPoint:
    """Point of the unit circle; inputs within 1e-14 of it are renormalized."""

    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not np.isfinite(v) or abs(abs(v) - 1.0) > BOUNDARY_SNAP:
            raise ValueError(f"{v!r} is not on the unit circle")
        object.__setattr__(self, "value", v / abs(v))

    def __complex__(self):
        return self.value


def _as_disc(z):
    if isinstance(z, DiscPoint):
        return z.value
    return DiscPoint(z).value


def _as_halfplane(w):
    if isinstance(w, HalfPlanePoint):
        return w.value
    return HalfPlanePoint(w).value


def _as_boundary(tau):
    if isinstance(tau, BoundaryPoint):
        return tau.value
    return BoundaryPoint(tau).value


def pseudo_hyperbolic(a, b):
    """|a - b| / |1 - conj(b) a|, vectorized."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.abs(a - b) / np.abs(1.0 - np.conj(b) * a)


def rho(a, b):
    """Hyperbolic distance arctanh(pseudo-hyperbolic modulus), vectorized, unchecked."""
    return np.arctanh(np.minimum(pseudo_hyperbolic(a, b), 1.0))


def hyperbolic_distance(a, b):
    """Hyperbolic distance between two points of the unit disc.

    The normalization is ``arctanh`` of the pseudo-hyperbolic distance, which
    corresponds to curvature -4.

    >>> round(hyperbolic_distance(0, 0.5), 7)
    0.5493061
    """
    return float(rho(_as_disc(a), _as_disc(b)))


def cayley_forward(tau, z):
    """(tau + z) / (tau - z): disc -> right half-plane, sending tau to infinity."""
    return (tau + z) / (tau - z)


def cayley_inverse(tau, w):
    """tau (w - 1) / (w + 1): right half-plane -> disc."""
    return tau * (w - 1.0) / (w + 1.0)


def cayley(direction, tau, point):
    """Cayley transform with pole ``tau`` on the unit circle.

    Parameters
    ----------
    direction : {"disc_to_halfplane", "halfplane_to_disc"}
    tau : BoundaryPoint or complex of unit modulus
    point : DiscPoint / HalfPlanePoint or complex

    Returns
    -------
    HalfPlanePoint or DiscPoint
    """
    t = _as_boundary(tau)
    if direction == "disc_to_halfplane":
        z = _as_disc(point)
        if z == t:
            raise DegenerateInput("Cayley transform evaluated at its pole")
        return HalfPlanePoint(cayley_forward(t, z))
    if direction == "halfplane_to_disc":
        return DiscPoint(cayley_inverse(t, _as_halfplane(point)))
    raise ValueError(f"unknown direction {direction!r}")


_FLOAT = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"^\s*({_FLOAT})([+-])((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i\s*$")


def parse_complex(text):
    """Parse a literal of the form ``a+bi`` or ``a-bi``.

    >>> parse_complex("0.5-2i")
    (0.5-2j)
    """
    m = _COMPLEX_RE.match(text)
    if m is None:
        raise ConfigError(f"malformed complex literal {text!r}; expected a+bi")
    re_part = float(m.group(1))
    im_part = float(m.group(3))
    return complex(re_part, -im_part if m.group(2) == "-" else im_part)


def format_complex(z):
    z = complex(z)
    sign = "-" if z.imag < 0 or (z.imag == 0 and np.signbit(z.imag)) else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"
