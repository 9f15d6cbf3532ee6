"""Driving signals and Herglotz functions p(z, t).

Every time-dependent object here evaluates as ``obj(z, t, anchor=None)``.
``anchor`` selects the piece of a piecewise signal by a time other than
``t``: the integrator passes the left end of the current inter-breakpoint
segment, so that stage evaluations at the right end of the segment still see
the left piece.  With ``anchor=None`` the piece containing ``t`` is used.
"""
import cmath
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, DegenerateInput, ValidationFailure
from .geometry import BOUNDARY_SNAP, cayley_forward, cayley_inverse
from .report import VerificationReport

INTERPOLATIONS = ("hold_left", "linear")
ANALYTIC_KINDS = (None, "constant", "unimodular_exponential", "brownian_sample")

DEFAULT_RADII = (0.25, 0.5, 0.75, 0.9)
DEFAULT_ANGLES = 64
TIMES_PER_UNIT = 32


@dataclass(frozen=True, eq=False)
class PiecewiseSignal:
    """Scalar complex control t -> value(t) with finitely many breakpoints.

    Node values are returned bit-for-bit at node times; after the last node
    the last value is held.  ``unimodular_exponential`` signals are evaluated
    in closed form as exp(i omega t).
    """

    times: tuple
    values: tuple
    interpolation: str = "hold_left"
    analytic_kind: Optional[str] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        values = tuple(complex(v) for v in self.values)
        if not times or len(times) != len(values):
            raise ConfigError("signal needs at least one node and matching values")
        if times[0] != 0.0:
            raise ConfigError("first signal node must be at t = 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("signal node times must be strictly increasing")
        if not all(math.isfinite(t) for t in times) or not all(cmath.isfinite(v) for v in values):
            raise ConfigError("signal nodes must be finite")
        if self.interpolation not in INTERPOLATIONS:
            raise ConfigError(f"unknown interpolation {self.interpolation!r}")
        if self.analytic_kind not in ANALYTIC_KINDS:
            raise ConfigError(f"unknown analytic kind {self.analytic_kind!r}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_omega", float(self.params.get("omega", 0.0)))

    def __call__(self, t, anchor=None):
        if self.analytic_kind == "unimodular_exponential":
            return cmath.exp(1j * self._omega * t)
        times, values = self.times, self.values
        n = len(times)
        if n == 1:
            return values[0]
        i = bisect_right(times, t if anchor is None else anchor) - 1
        if i < 0:
            i = 0
        if anchor is None and times[i] == t:
            return values[i]
        if i >= n - 1 or self.interpolation == "hold_left":
            return values[i]
        t0, t1 = times[i], times[i + 1]
        if t == t1:
            return values[i + 1]
        v0 = values[i]
        return v0 + (values[i + 1] - v0) * ((t - t0) / (t1 - t0))

    @property
    def breakpoints(self):
        if self.analytic_kind == "unimodular_exponential":
            return ()
        return self.times[1:]

    @property
    def is_constant(self):
        if self.analytic_kind == "unimodular_exponential":
            return self._omega == 0.0
        return all(v == self.values[0] for v in self.values)

    def map_values(self, fn, interpolation=None, analytic_kind=None):
        """New signal with ``fn`` applied to every node value."""
        return PiecewiseSignal(self.times, tuple(fn(v) for v in self.values),
                               interpolation or self.interpolation, analytic_kind,
                               dict(self.params))


def constant_signal(value):
    return PiecewiseSignal((0.0,), (complex(value),), analytic_kind="constant")


def exponential_signal(omega):
    """k(t) = exp(i omega t)."""
    return PiecewiseSignal((0.0,), (1.0,), analytic_kind="unimodular_exponential",
                           params={"omega": float(omega)})


def node_signal(nodes, interpolation="hold_left"):
    """Signal from a list of ``(time, value)`` pairs."""
    nodes = list(nodes)
    return PiecewiseSignal(tuple(t for t, _ in nodes), tuple(v for _, v in nodes), interpolation)


def as_signal(value):
    if isinstance(value, PiecewiseSignal):
        return value
    return constant_signal(value)


def eval_signal(s, t):
    if t < 0:
        raise ValueError("signals are defined for t >= 0")
    return s(t)


def brownian_driving(kappa, horizon, step, seed):
    """Sample i * sqrt(kappa) * B(t) on a uniform grid, linearly interpolated.

    Increments are Normal(0, kappa * dt); identical seeds give identical nodes.
    """
    if not step > 0 or not horizon > 0:
        raise ConfigError("brownian_driving needs positive step and horizon")
    if kappa < 0:
        raise ConfigError("kappa must be non-negative")
    n = max(1, int(math.ceil(horizon / step - 1e-9)))
    times = np.minimum(np.arange(n + 1) * float(step), float(horizon))
    rng = np.random.default_rng(seed)
    dt = np.diff(times)
    increments = rng.normal(0.0, 1.0, size=n) * np.sqrt(kappa * dt)
    x = np.concatenate(([0.0], np.cumsum(increments)))
    return PiecewiseSignal(tuple(times), tuple(1j * x), "linear", "brownian_sample",
                           {"kappa": float(kappa), "horizon": float(horizon),
                            "step": float(step), "seed": int(seed)})


@dataclass(frozen=True, eq=False)
class DrivingPoint:
    """Driving point tau(t) in the closed unit disc."""

    signal: PiecewiseSignal

    def __post_init__(self):
        s = as_signal(self.signal)

        def snap(v):
            m = abs(v)
            if m > 1.0 + BOUNDARY_SNAP:
                raise ValidationFailure(f"driving point {v!r} outside the closed disc")
            if m > 1.0 - BOUNDARY_SNAP:
                return v / m
            return v

        if s.analytic_kind != "unimodular_exponential":
            s = s.map_values(snap, analytic_kind=s.analytic_kind)
        object.__setattr__(self, "signal", s)

    def __call__(self, t, anchor=None):
        return self.signal(t, anchor)

    @property
    def breakpoints(self):
        return self.signal.breakpoints

    @property
    def is_constant(self):
        return self.signal.is_constant

    def on_boundary(self, t=0.0):
        return abs(self(t)) == 1.0


@dataclass(frozen=True, eq=False)
class HerglotzFunction:
    """p(z, t): holomorphic in z with non-negative real part.

    ``func(z, t, anchor)`` must accept numpy arrays for ``z``.  ``dz`` is the
    analytic z-derivative when known.
    """

    func: Callable
    kind: str
    declared_order: float = math.inf
    breakpoints: tuple = ()
    dz: Optional[Callable] = None
    autonomous: bool = False
    description: dict = field(default_factory=dict)

    def __call__(self, z, t, anchor=None):
        return self.func(z, t, anchor)


def _merge_breakpoints(*groups):
    return tuple(sorted(set(b for g in groups for b in g)))


def constant_p(value, declared_order=math.inf):
    """p(z, t) = c(t), constant in z.  ``value`` is a complex or a signal."""
    c = as_signal(value)

    def func(z, t, anchor=None):
        return c(t, anchor) + 0.0 * z

    def dz(z, t, anchor=None):
        return 0.0 * z

    return HerglotzFunction(func, "constant_in_z", declared_order, c.breakpoints, dz,
                            c.is_constant, {"kind": "constant", "signal": c})


def cayley_kernel_p(k, declared_order=math.inf):
    """p(z, t) = (1 + k(t) z) / (1 - k(t) z) with |k(t)| <= 1."""
    k = as_signal(k)
    if k.analytic_kind != "unimodular_exponential" and any(abs(v) > 1.0 + 1e-12 for v in k.values):
        raise ValidationFailure("Cayley kernel parameter must lie in the closed disc")

    def func(z, t, anchor=None):
        kz = k(t, anchor) * z
        return (1.0 + kz) / (1.0 - kz)

    def dz(z, t, anchor=None):
        kt = k(t, anchor)
        return 2.0 * kt / (1.0 - kt * z) ** 2

    return HerglotzFunction(func, "cayley_kernel", declared_order, k.breakpoints, dz,
                            k.is_constant, {"kind": "cayley_kernel", "signal": k})


def radial_p(k, declared_order=math.inf):
    """Loewner's radial kernel (1 + k(t) z) / (1 - k(t) z) for unimodular k."""
    k = as_signal(k)
    if k.analytic_kind != "unimodular_exponential":
        bad = [v for v in k.values if abs(abs(v) - 1.0) > 1e-12]
        if bad:
            raise ValidationFailure(f"radial driving value {bad[0]!r} is not unimodular")
    return cayley_kernel_p(k, declared_order)


def chordal_p(h, tau=1.0, declared_order=math.inf):
    """Disc Herglotz function whose half-plane transfer is 1 / (w + h(t)).

    p(z, t) = 1 / (2 (T(z) + h(t))) with T the Cayley map of pole ``tau``.
    """
    h = as_signal(h)
    tau = complex(tau)
    if abs(abs(tau) - 1.0) > BOUNDARY_SNAP:
        raise ValidationFailure("chordal pole must lie on the unit circle")
    tau = tau / abs(tau)
    if any(v.real < -1e-14 for v in h.values):
        raise ValidationFailure("chordal driving h(t) must have non-negative real part")

    def func(z, t, anchor=None):
        return 0.5 / (cayley_forward(tau, z) + h(t, anchor))

    def dz(z, t, anchor=None):
        s = cayley_forward(tau, z) + h(t, anchor)
        return -0.5 / s ** 2 * (2.0 * tau / (tau - z) ** 2)

    return HerglotzFunction(func, "chordal_reciprocal", declared_order, h.breakpoints, dz,
                            h.is_constant, {"kind": "chordal", "signal": h, "tau": tau})


def table_p(times, coefficients, declared_order=math.inf):
    """Piecewise-constant-in-time polynomial p(z, t) = sum_j c_j(t) z**j.

    Row ``i`` of ``coefficients`` (ascending powers) is used on
    [times[i], times[i+1]).
    """
    times = tuple(float(t) for t in times)
    rows = [np.asarray(c, dtype=complex)[::-1] for c in coefficients]
    if len(rows) != len(times) or not rows:
        raise ConfigError("table needs one coefficient row per time")
    index = PiecewiseSignal(times, tuple(range(len(times))), "hold_left")
    drows = [np.polyder(r) if len(r) > 1 else np.zeros(1, dtype=complex) for r in rows]

    def func(z, t, anchor=None):
        return np.polyval(rows[int(index(t, anchor).real)], z) + 0.0 * z

    def dz(z, t, anchor=None):
        return np.polyval(drows[int(index(t, anchor).real)], z) + 0.0 * z

    return HerglotzFunction(func, "user_table", declared_order, index.breakpoints, dz,
                            len(rows) == 1, {"kind": "table"})


def user_p(func, declared_order=math.inf, breakpoints=(), autonomous=False):
    """Wrap a callable ``func(z, t)`` as a Herglotz function."""
    return HerglotzFunction(lambda z, t, anchor=None: func(z, t), "user_table", declared_order,
                            tuple(breakpoints), None, autonomous, {"kind": "user"})


def _polar_grid(radii, angles):
    theta = 2.0 * np.pi * np.arange(angles) / angles
    return (np.asarray(radii, dtype=float)[:, None] * np.exp(1j * theta)[None, :]).ravel()


def _default_times(horizon):
    n = max(1, int(round(TIMES_PER_UNIT * horizon)))
    return np.arange(n) * (horizon / n)


def validate_herglotz(p, radii=DEFAULT_RADII, times=None, horizon=1.0, tol=1e-12,
                      raise_on_failure=True):
    """Check that ``p`` is a Herglotz function on sampled polar grids.

    Three checks run at every sampled time: Re p >= -tol; the distortion bound
    |p(z)| <= (1+|z|)/(1-|z|) |p(0)| with slack 1e-9; and holomorphy, by
    64-point trapezoid Cauchy integrals on circles of radius (1-|z|)/2 about
    each grid point (mean value reproduces p(z), and the contour integral of
    p vanishes) with defect below 1e-8 relative to the local size of p.

    The returned report has ``max_defect`` equal to the worst defect divided
    by its threshold, so it passes iff ``max_defect <= 1``.
    """
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0) or np.any(radii >= 1):
        raise ConfigError("validation radii must lie in (0, 1)")
    if times is None:
        times = _default_times(horizon)
    z = _polar_grid(radii, DEFAULT_ANGLES)
    rad = (1.0 - np.abs(z)) / 2.0
    m = 64
    omega = np.exp(2j * np.pi * np.arange(m) / m)
    circle = z[:, None] + rad[:, None] * omega[None, :]
    limits = {"re_p": tol, "distortion": 1e-9, "cauchy": 1e-8}
    worst = {"ratio": -math.inf}
    samples = 0
    for t in times:
        t = float(t)
        pz = np.asarray(p(z, t), dtype=complex)
        p0 = complex(np.asarray(p(np.zeros(1), t))[0])
        pc = np.asarray(p(circle, t), dtype=complex)
        scale = 1.0 + np.max(np.abs(pc), axis=1)
        defects = {
            "re_p": -pz.real,
            "distortion": np.abs(pz) - (1 + np.abs(z)) / (1 - np.abs(z)) * abs(p0),
            "cauchy": np.maximum(np.abs(pc.mean(axis=1) - pz),
                                 np.abs((pc * omega[None, :]).mean(axis=1))) / scale,
        }
        for name, d in defects.items():
            d = np.where(np.isfinite(d), d, math.inf)
            j = int(np.argmax(d))
            ratio = float(d[j]) / limits[name]
            if ratio > worst["ratio"]:
                worst = {"ratio": ratio, "check": name, "z": complex(z[j]), "t": t,
                         "defect": float(d[j])}
        samples += z.size
    ratio = worst.pop("ratio")
    report = VerificationReport("herglotz", max(ratio, 0.0), 1.0, samples, worst)
    if raise_on_failure and not report.passed:
        raise ValidationFailure(
            f"not a Herglotz function: {worst['check']} defect {worst['defect']:.3e} "
            f"at z={worst['z']:.4g}, t={worst['t']:.4g}", report)
    return report


@dataclass(frozen=True, eq=False)
class HalfPlaneField:
    """Herglotz function P(w, t) of the right half-plane, used as a vector field."""

    func: Callable
    kind: str
    breakpoints: tuple = ()
    h: Optional[PiecewiseSignal] = None

    def __call__(self, w, t, anchor=None):
        return self.func(w, t, anchor)


def transfer_to_halfplane(p, tau):
    """P(w, t) = 2 p(T^{-1}(w), t) for the Cayley map T with pole ``tau``."""
    tau = complex(getattr(tau, "value", tau))
    if abs(abs(tau) - 1.0) > BOUNDARY_SNAP:
        raise ValidationFailure("transfer pole must lie on the unit circle")
    tau = tau / abs(tau)

    def func(w, t, anchor=None):
        if np.ndim(w) == 0 and not cmath.isfinite(complex(w)):
            raise DegenerateInput("half-plane transfer evaluated at infinity")
        return 2.0 * p(cayley_inverse(tau, w), t, anchor)

    return HalfPlaneField(func, "transfer", tuple(p.breakpoints))


def chordal_field(h):
    """P(w, t) = 1 / (w + h(t)) with Re h >= 0 (h imaginary in the classical case)."""
    h = as_signal(h)
    if any(v.real < -1e-14 for v in h.values):
        raise ValidationFailure("chordal driving h(t) must have non-negative real part")

    def func(w, t, anchor=None):
        return 1.0 / (w + h(t, anchor))

    return HalfPlaneField(func, "chordal", h.breakpoints, h)
