"""Herglotz vector fields G(z, t) and their Berkson-Porta data (tau, p).

A field built by :func:`compose_bp` is

    G(z, t) = (z - tau(t)) (conj(tau(t)) z - 1) p(z, t),

and :func:`decompose_bp` recovers (tau(t), p(., t)) from the values of G at a
fixed time.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import AmbiguousDecomposition, NotAGenerator, NumericalFailure
from .herglotz import (DEFAULT_ANGLES, DEFAULT_RADII, DrivingPoint, HerglotzFunction,
                       _merge_breakpoints, _polar_grid, validate_herglotz)


class IdentityMarker:
    """Returned instead of Berkson-Porta data when G(., t) vanishes identically."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "IDENTITY"


IDENTITY = IdentityMarker()


@dataclass(frozen=True, eq=False)
class BerksonPortaData:
    tau: DrivingPoint
    p: HerglotzFunction
    validate: bool = True

    def __post_init__(self):
        if not isinstance(self.tau, DrivingPoint):
            object.__setattr__(self, "tau", DrivingPoint(self.tau))
        if self.validate:
            validate_herglotz(self.p)


@dataclass(frozen=True, eq=False)
class HerglotzVectorField:
    """Time-dependent holomorphic vector field on the unit disc.

    ``func(z, t, anchor)`` and the optional analytic derivative ``dz`` accept
    numpy arrays for ``z``.
    """

    func: Callable
    dz: Optional[Callable] = None
    breakpoints: tuple = ()
    autonomous: bool = False
    declared_order: float = math.inf
    source: Optional[BerksonPortaData] = None
    name: str = "field"

    def __call__(self, z, t, anchor=None):
        return self.func(z, t, anchor)


def compose_bp(data, name="berkson_porta"):
    """Herglotz vector field with Berkson-Porta data ``(data.tau, data.p)``."""
    tau, p = data.tau, data.p

    def func(z, t, anchor=None):
        a = tau(t, anchor)
        return (z - a) * (a.conjugate() * z - 1.0) * p(z, t, anchor)

    dz = None
    if p.dz is not None:
        def dz(z, t, anchor=None):
            a = tau(t, anchor)
            ac = a.conjugate()
            return ((2.0 * ac * z - 1.0 - (a * ac).real) * p(z, t, anchor)
                    + (z - a) * (ac * z - 1.0) * p.dz(z, t, anchor))

    return HerglotzVectorField(func, dz, _merge_breakpoints(tau.breakpoints, p.breakpoints),
                               tau.is_constant and p.autonomous, p.declared_order, data, name)


def polynomial_field(coefficients, name="polynomial"):
    """Autonomous field G(z) = sum_j a_j z**j (ascending coefficients), no BP source."""
    c = np.asarray(coefficients, dtype=complex)[::-1]
    if c.size == 0:
        c = np.zeros(1, dtype=complex)
    dc = np.polyder(c) if c.size > 1 else np.zeros(1, dtype=complex)
    return HerglotzVectorField(lambda z, t, anchor=None: np.polyval(c, z) + 0.0 * z,
                               lambda z, t, anchor=None: np.polyval(dc, z) + 0.0 * z,
                               (), True, math.inf, None, name)


def field_from_callable(func, breakpoints=(), autonomous=False, declared_order=math.inf,
                        name="user"):
    """Wrap ``func(z, t)`` (numpy-vectorized in z) as a field without BP source."""
    return HerglotzVectorField(lambda z, t, anchor=None: func(z, t), None, tuple(breakpoints),
                               autonomous, declared_order, None, name)


def eval_field(G, z, t):
    z = getattr(z, "value", z)
    out = G(z, t)
    return complex(out) if np.ndim(out) == 0 else np.asarray(out, dtype=complex)


def cauchy_derivative(f, z, m=32):
    """z-derivative of holomorphic ``f`` by an m-point trapezoid Cauchy integral.

    The circle has radius min(0.1, (1 - |z|)/2) about each point.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise NumericalFailure("Cauchy circle would leave the unit disc")
    rad = np.minimum(0.1, (1.0 - np.abs(z)) / 2.0)
    omega = np.exp(2j * np.pi * np.arange(m) / m)
    pts = z[..., None] + rad[..., None] * omega
    vals = np.asarray(f(pts), dtype=complex)
    return (vals * omega.conjugate()).mean(axis=-1) / rad


def field_derivative(G, z, t, anchor=None, margin=1e-12):
    """dG/dz at (z, t): analytic when the field provides it, else Cauchy quadrature."""
    z = getattr(z, "value", z)
    zarr = np.asarray(z, dtype=complex)
    if np.any(np.abs(zarr) >= 1.0 - margin):
        raise NumericalFailure("derivative requested too close to the unit circle")
    if G.dz is not None:
        out = G.dz(zarr, t, anchor) + 0.0 * zarr
    else:
        out = cauchy_derivative(lambda w: G(w, t, anchor), zarr)
    return complex(out) if np.ndim(z) == 0 else out


@dataclass(frozen=True, eq=False)
class BPSnapshot:
    """Berkson-Porta data of G(., t) at one time: tau and p = G / ((z-tau)(conj(tau) z - 1))."""

    tau: complex
    t: float
    g: Callable = field(repr=False)

    @property
    def boundary(self):
        return abs(self.tau) >= 1.0 - 1e-9

    def p(self, z):
        z = np.asarray(z, dtype=complex)
        tau = self.tau
        factor = lambda w: (w - tau) * (tau.conjugate() * w - 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(self.g(z) / factor(z), dtype=complex)
        near = np.abs(z - tau) < 1e-3
        if np.any(near):
            # removable singularity at an interior tau: mean value over a small circle
            rad = min(1e-2, (1.0 - abs(tau)) / 2.0)
            omega = np.exp(2j * np.pi * np.arange(32) / 32)
            pts = z[near][:, None] + rad * omega
            out[near] = (self.g(pts) / factor(pts)).mean(axis=1)
        return out if out.ndim else complex(out)


def _newton_roots(g, dg, seeds, inside=1.0 - 1e-12, iters=80):
    z = np.array(seeds, dtype=complex)
    gz = g(z)
    for _ in range(iters):
        d = dg(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(np.abs(d) > 0, gz / d, 0.0)
        step = np.where(np.isfinite(step), step, 0.0)
        lam = np.ones(z.shape)
        todo = np.abs(step) > 1e-16
        newz, newg = z.copy(), gz.copy()
        for _ in range(40):
            if not np.any(todo):
                break
            trial = z[todo] - lam[todo] * step[todo]
            ok = np.abs(trial) < inside
            gt = np.full(trial.shape, np.inf, dtype=complex)
            if np.any(ok):
                gt[ok] = g(trial[ok])
            better = ok & (np.abs(gt) < np.abs(gz[todo]))
            idx = np.flatnonzero(todo)
            newz[idx[better]] = trial[better]
            newg[idx[better]] = gt[better]
            todo[idx[better]] = False
            lam[todo] *= 0.5
        moved = np.abs(newz - z)
        z, gz = newz, newg
        if np.all(moved < 1e-15):
            break
    return z, gz


def _seeds():
    seeds = [0.0 + 0.0j]
    for k, r in enumerate((0.3, 0.6, 0.85)):
        theta = 2 * np.pi * (np.arange(8) + 0.5 * k) / 8
        seeds.extend(r * np.exp(1j * theta))
    return np.array(seeds)


_R_SAMPLES = np.array([0.9, 0.99, 0.999])


def _extrapolation_weights(x):
    """Lagrange weights evaluating the interpolant through nodes ``x`` at 0."""
    w = np.ones(len(x))
    for i in range(len(x)):
        for j in range(len(x)):
            if i != j:
                w[i] *= x[j] / (x[j] - x[i])
    return w


_R_WEIGHTS = _extrapolation_weights(1.0 - _R_SAMPLES)


def _boundary_modulus(g, theta):
    eta = np.exp(1j * np.atleast_1d(theta))
    vals = g(_R_SAMPLES[:, None] * eta[None, :])
    return np.abs(_R_WEIGHTS @ vals)


_REFINE_EPS = (1e-2, 1e-3, 1e-4, 1e-5)


def _refine_boundary(g, theta0, width):
    """Sharpen a boundary driving direction.

    On the circle |z| = 1 - eps the minimizer of |G| sits at
    theta0 + O(eps**2) whatever the order of the boundary zero, while the
    radially extrapolated modulus only resolves theta to the root of its
    error.  Circles are tightened step by step and the last two minimizers
    are Richardson-combined.
    """
    theta, found = theta0, []
    for eps in _REFINE_EPS:
        r = 1.0 - eps
        res = minimize_scalar(lambda th: float(np.log(np.abs(g(np.array([r * np.exp(1j * th)]))[0])
                                                      + 1e-300)),
                              bounds=(theta - width, theta + width), method="bounded",
                              options={"xatol": 1e-15, "maxiter": 500})
        theta = float(res.x)
        found.append(theta)
        width = 2.0 * eps
    ratio = (_REFINE_EPS[-2] / _REFINE_EPS[-1]) ** 2
    return (ratio * found[-1] - found[-2]) / (ratio - 1.0)


def decompose_bp(G, t, root_tol=1e-12, max_candidates=8):
    """Recover the Berkson-Porta data of ``G(., t)``.

    Returns :data:`IDENTITY` when G vanishes on the validation grid, else a
    :class:`BPSnapshot`.  An interior tau is located by damped Newton from 25
    seeds; otherwise tau is the boundary direction minimizing the radially
    extrapolated |G| (256 directions, refined by bounded Brent search and then
    by minimizing |G| on circles approaching the boundary), keeping only
    candidates whose recovered p has Re p >= -1e-9 on the grid.

    Raises
    ------
    NotAGenerator
        The recovered p has negative real part.
    AmbiguousDecomposition
        Two admissible driving points were found.
    """
    g = lambda z: np.asarray(G(z, t), dtype=complex) + 0.0 * z
    grid = _polar_grid(DEFAULT_RADII, DEFAULT_ANGLES)
    gv = g(grid)
    scale = float(np.max(np.abs(gv)))
    if scale < 1e-13:
        return IDENTITY

    def admissible(tau):
        snap = BPSnapshot(complex(tau), t, g)
        re = snap.p(grid).real
        return snap, float(-np.min(re)) if np.all(np.isfinite(re)) else math.inf

    dg = (lambda z: field_derivative(G, z, t)) if G.dz is not None else \
        (lambda z: cauchy_derivative(g, z))
    z, gz = _newton_roots(g, dg, _seeds())
    good = (np.abs(z) < 1.0 - 1e-9) & (np.abs(gz) <= root_tol * max(scale, 1.0))
    roots = []
    for r in z[good]:
        if all(abs(r - q) > 1e-6 for q in roots):
            roots.append(complex(r))
    if len(roots) > 1:
        raise AmbiguousDecomposition(f"interior zeros at {roots}")
    if roots:
        snap, defect = admissible(roots[0])
        if defect > 1e-9:
            raise NotAGenerator(f"recovered p has Re p = {-defect:.3e} < 0 (tau = {roots[0]:.6g})")
        return snap

    n = 256
    theta = 2 * np.pi * np.arange(n) / n
    score = _boundary_modulus(g, theta)
    is_min = (score <= np.roll(score, 1)) & (score <= np.roll(score, -1))
    cand = np.flatnonzero(is_min)
    cand = cand[np.argsort(score[cand])][:max_candidates]
    found = []
    for j in cand:
        half = 2 * np.pi / n
        res = minimize_scalar(lambda u: float(_boundary_modulus(g, theta[j] + u)[0]),
                              bounds=(-half, half), method="bounded",
                              options={"xatol": 1e-14, "maxiter": 500})
        tau = complex(np.exp(1j * _refine_boundary(g, theta[j] + res.x, 2 * half)))
        snap, defect = admissible(tau)
        if defect <= 1e-9 and all(abs(tau - f.tau) > 1e-6 for f in found):
            found.append(snap)
    if not found:
        raise NotAGenerator("no admissible driving point: recovered p has negative real part")
    if len(found) > 1:
        raise AmbiguousDecomposition(f"boundary driving points {[f.tau for f in found]}")
    return found[0]


def is_generator(G, t):
    """True iff ``G(., t)`` admits a Berkson-Porta representation (or vanishes)."""
    try:
        decompose_bp(G, t)
    except (NotAGenerator, AmbiguousDecomposition):
        return False
    return True


def wvf3_constant(r):
    """4 (1 + r) / (1 - r): multiplier of |p(0, t)| bounding |G| on |z| <= r."""
    return 4.0 * (1.0 + r) / (1.0 - r)


def lipschitz_from_wvf3(k_outer, r):
    """Lipschitz constant on |z| <= r from a bound ``k_outer`` for |G| on |z| <= (1 + r)/2."""
    return 4.0 * np.asarray(k_outer) / (1.0 - r) ** 2


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def integrate_piecewise(fn, a, b, breakpoints=(), max_panel=0.05):
    """Integral of ``fn`` (vectorized in t) over [a, b], Gauss-Legendre per panel.

    Panels never straddle a breakpoint.
    """
    if b <= a:
        return 0.0
    edges = [a] + [x for x in breakpoints if a < x < b] + [b]
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        n = max(1, int(math.ceil((hi - lo) / max_panel)))
        e = np.linspace(lo, hi, n + 1)
        mid = 0.5 * (e[1:] + e[:-1])
        half = 0.5 * (e[1:] - e[:-1])
        t = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
        w = (half[:, None] * _GL_W[None, :]).ravel()
        total += float(np.dot(w, fn(t)))
    return total


@dataclass(frozen=True, eq=False)
class FieldBounds:
    """Explicit bounds for |G| and its Lipschitz constant on |z| <= r, t in [0, T]."""

    r: float
    T: float
    wvf3_bound: Callable
    lipschitz_bound: Callable
    breakpoints: tuple = ()

    def integral(self, which, a, b):
        fn = self.wvf3_bound if which == "wvf3" else self.lipschitz_bound
        return integrate_piecewise(fn, a, b, self.breakpoints)


def p_at_origin(G):
    """t -> |p(0, t)| for the field's Berkson-Porta data (recovered if not stored)."""
    if G.source is not None:
        p = G.source.p
        return lambda t: abs(complex(np.asarray(p(np.zeros(1), t))[0]))
    cache = {}

    def value(t):
        key = 0.0 if G.autonomous else float(t)
        if key not in cache:
            snap = decompose_bp(G, key)
            cache[key] = 0.0 if snap is IDENTITY else abs(complex(snap.p(np.zeros(1))[0]))
        return cache[key]

    return value


def bounds(G, r, T):
    """WHVF3 and Lipschitz bound functions from |p(0, t)|.

    wvf3_bound(t) = 4 (1+r)/(1-r) |p(0,t)|;
    lipschitz_bound(t) = 4 k_A(t) / (1-r)**2 with k_A the wvf3 bound at radius (1+r)/2.
    """
    if not 0.0 <= r < 1.0:
        raise ValueError("bounds radius must lie in [0, 1)")
    p0 = p_at_origin(G)
    r_outer = (1.0 + r) / 2.0

    def p0_vec(t):
        t = np.asarray(t, dtype=float)
        return np.vectorize(p0, otypes=[float])(t) if t.ndim else p0(float(t))

    wvf3 = lambda t: wvf3_constant(r) * p0_vec(t)
    lip = lambda t: lipschitz_from_wvf3(wvf3_constant(r_outer) * p0_vec(t), r)
    return FieldBounds(r, T, wvf3, lip, tuple(G.breakpoints))
