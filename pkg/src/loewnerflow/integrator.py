"""Carathéodory solutions of w' = G(w, t): evolution families and their derivatives.

The solver is an embedded Dormand-Prince 5(4) pair with PI step-size
control.  Steps never straddle a breakpoint of the driving signals, and every
stage of a step evaluates the field with the left end of the current segment
as ``anchor``, so a hold-left control is seen as constant across the step.
All routines integrate numpy arrays of points at once; the step-size
controller uses the worst component.
"""
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError, ContractionFailure, NumericalFailure
from .field import cauchy_derivative, field_derivative

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension of order 4: y(t0 + x h) = y0 + h * K^T P [x, x^2, x^3, x^4]
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


@dataclass(frozen=True)
class SolverOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.05
    boundary_margin: float = 1e-12
    max_steps: int = 10_000_000

    def __post_init__(self):
        if min(self.rel_tol, self.abs_tol, self.max_step, self.boundary_margin) <= 0:
            raise ConfigError("solver options must be positive")
        if self.max_steps <= 0:
            raise ConfigError("max_steps must be positive")
        if self.boundary_margin >= 1e-6:
            raise ConfigError("boundary_margin must be below 1e-6")

    def tightened(self, factor):
        return SolverOptions(self.rel_tol / factor, self.abs_tol / factor, self.max_step,
                             self.boundary_margin, self.max_steps)

    def digest(self):
        return hashlib.sha256(json.dumps(asdict(self), sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class Trajectory:
    """Accepted steps of one positive trajectory.

    ``dense[i]`` holds the four coefficients of the continuous extension on
    step i: w(t_i + x h_i) = points[i] + sum_j dense[i, j] x**(j + 1).
    """

    times: np.ndarray
    points: np.ndarray
    dense: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def final(self):
        return complex(self.points[-1])

    def at_fraction(self, i, x):
        """Dense-output value at t_i + x (t_{i+1} - t_i)."""
        c = self.dense[i]
        return self.points[i] + x * (c[0] + x * (c[1] + x * (c[2] + x * c[3])))

    @property
    def mid_points(self):
        return np.array([self.at_fraction(i, 0.5) for i in range(len(self.dense))],
                        dtype=complex)

    def records(self):
        return [{"t": float(t), "z": [float(z.real), float(z.imag)]}
                for t, z in zip(self.times, self.points)]

    def to_jsonl(self):
        return "".join(json.dumps(r) + "\n" for r in self.records())

    def simpson(self, values_fn, eps=1e-12, max_depth=12):
        """Integral over the trajectory's time span, accepted steps as panels.

        ``values_fn(t, w, anchor)`` is evaluated on the dense output; ``anchor``
        is the left end of each step.  Each step starts with one Simpson panel
        and is bisected adaptively until the Richardson estimate drops below
        ``eps`` per unit time.
        """
        t = self.times
        total = 0.0
        for i in range(len(t) - 1):
            a, b = t[i], t[i + 1]
            f = lambda x: values_fn(a + x * (b - a), self.at_fraction(i, x), a)
            total += (b - a) * _adaptive_simpson(f, 0.0, 1.0, f(0.0), f(0.5), f(1.0),
                                                 eps, max_depth)
        return total


def _adaptive_simpson(f, lo, hi, flo, fmid, fhi, eps, depth):
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    m = 0.5 * (lo + hi)
    fl, fr = f(0.5 * (lo + m)), f(0.5 * (m + hi))
    left = (m - lo) / 6.0 * (flo + 4.0 * fl + fmid)
    right = (hi - m) / 6.0 * (fmid + 4.0 * fr + fhi)
    if depth <= 0 or abs(left + right - whole) <= 15.0 * eps:
        return left + right + (left + right - whole) / 15.0
    return (_adaptive_simpson(f, lo, m, flo, fl, fmid, 0.5 * eps, depth - 1)
            + _adaptive_simpson(f, m, hi, fmid, fr, fhi, 0.5 * eps, depth - 1))


def _segments(s, t, breakpoints):
    return [s] + [b for b in breakpoints if s < b < t] + [t]


def _solve(rhs, y0, s, t, breakpoints, opts, guard, record=False):
    """Integrate y' = rhs(t, y, anchor) from s to t.

    ``guard(y)`` returns a boolean array, False where a state has left the
    domain.  Returns (y(t), times, states, dense) where dense[i] has shape
    (4, n): the continuous-extension coefficients of step i.
    """
    y = np.array(y0, dtype=complex)
    times, states, dense = [s], [y.copy()], []
    if t == s:
        return y, times, states, dense
    h = None
    steps = 0
    err_prev = 1.0
    edges = _segments(s, t, breakpoints)
    for a, b in zip(edges, edges[1:]):
        tc = a
        f = rhs(a, y, a)
        if h is None:
            sc = opts.abs_tol + opts.rel_tol * np.abs(y)
            d0 = np.max(np.abs(y) / sc)
            d1 = np.max(np.abs(f) / sc)
            h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-4
            h = min(h, opts.max_step)
        while tc < b:
            h = min(h, opts.max_step)
            last = tc + h >= b - 1e-12 * max(1.0, abs(b))
            if last:
                h = b - tc
            k = [f]
            for i in range(1, 7):
                yi = y + h * sum(aij * kj for aij, kj in zip(_A[i], k) if aij != 0.0)
                ti = b if (last and _C[i] == 1.0) else tc + _C[i] * h
                with np.errstate(all="ignore"):
                    k.append(np.asarray(rhs(ti, yi, a), dtype=complex))
            ynew = yi  # stage 7 state equals the 5th-order solution (FSAL)
            with np.errstate(all="ignore"):
                errv = h * sum(e * kj for e, kj in zip(_E, k) if e != 0.0)
                sc = opts.abs_tol + opts.rel_tol * np.maximum(np.abs(y), np.abs(ynew))
                err = float(np.max(np.abs(errv) / sc))
            if not math.isfinite(err):
                err = math.inf
            steps += 1
            if steps > opts.max_steps:
                raise NumericalFailure(f"exceeded max_steps={opts.max_steps}")
            if err <= 1.0:
                if not np.all(guard(ynew)):
                    raise NumericalFailure(
                        f"trajectory reached the domain boundary guard at t={tc + h:.6g}")
                if record:
                    dense.append(h * np.tensordot(_P.T, np.stack(k), axes=1))
                y = ynew
                f = k[6]
                tc = b if last else tc + h
                if record:
                    times.append(tc)
                    states.append(y.copy())
                fac = 0.9 * max(err, 1e-10) ** (-0.7 / 5) * err_prev ** (0.4 / 5)
                h *= min(5.0, max(0.2, fac))
                err_prev = max(err, 1e-4)
            else:
                h *= 0.2 if not math.isfinite(err) else max(0.2, 0.9 * err ** (-0.2))
                if h < 1e-14 * max(1.0, abs(tc)):
                    raise NumericalFailure(f"step size underflow at t={tc:.6g}")
    if not record:
        times, states = [s, t], [np.array(y0, dtype=complex), y]
    return y, times, states, dense


def _first_component(dense):
    return np.array([d[:, 0] for d in dense], dtype=complex).reshape(-1, 4)


def _disc_guard(margin, n=None):
    limit = 1.0 - margin

    def guard(y):
        w = y if n is None else y[:n]
        return np.abs(w) < limit

    return guard


def _check_times(s, t):
    if not (0.0 <= s <= t):
        raise ValueError(f"need 0 <= s <= t, got s={s}, t={t}")


@dataclass(frozen=True, eq=False)
class EvolutionFamilyHandle:
    """Evolution family phi_{s,t} generated by a Herglotz vector field.

    With ``homogeneous=True`` (semigroup families) phi_{s,t} is computed as
    phi_{0,t-s}.
    """

    field: object
    options: SolverOptions = SolverOptions()
    homogeneous: bool = False

    def _window(self, s, t):
        _check_times(s, t)
        return (0.0, t - s) if self.homogeneous else (s, t)

    def _rhs(self):
        G = self.field
        return lambda t, y, anchor: G(y, t, anchor)

    def _rhs_variational(self, n):
        G = self.field

        def rhs(t, y, anchor):
            w, v = y[:n], y[n:]
            if G.dz is not None:
                d = G.dz(w, t, anchor)
            else:
                d = cauchy_derivative(lambda x: G(x, t, anchor), w)
            return np.concatenate([G(w, t, anchor) + 0.0 * w, d * v])

        return rhs

    def evolve_array(self, z, s, t, record=False):
        a, b = self._window(s, t)
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if np.any(np.abs(z) >= 1.0):
            raise ValueError("initial points must lie in the unit disc")
        return _solve(self._rhs(), z, a, b, self.field.breakpoints, self.options,
                      _disc_guard(self.options.boundary_margin), record)

    def evolve(self, z, s, t, trajectory=False):
        """phi_{s,t}(z); with ``trajectory=True`` also the accepted steps."""
        z = complex(getattr(z, "value", z))
        y, times, states, dense = self.evolve_array([z], s, t, record=trajectory)
        if not trajectory:
            return complex(y[0])
        shift = s - self._window(s, t)[0]
        traj = Trajectory(np.array(times) + shift, np.array([x[0] for x in states]),
                          _first_component(dense),
                          {"field": getattr(self.field, "name", "field"), "z": z, "s": s,
                           "options": self.options.digest()})
        return complex(y[0]), traj

    def evolve_with_derivative_array(self, z, s, t):
        a, b = self._window(s, t)
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        n = z.size
        y0 = np.concatenate([z, np.ones(n, dtype=complex)])
        y, *_ = _solve(self._rhs_variational(n), y0, a, b, self.field.breakpoints,
                       self.options, _disc_guard(self.options.boundary_margin, n))
        return y[:n], y[n:]

    def evolve_with_derivative(self, z, s, t):
        """(phi_{s,t}(z), phi_{s,t}'(z)) by the variational equation v' = G'(w) v."""
        z = complex(getattr(z, "value", z))
        w, v = self.evolve_with_derivative_array([z], s, t)
        return complex(w[0]), complex(v[0])

    def partial_s(self, z, s, t):
        """d phi_{s,t}(z) / ds = -G(z, s) phi_{s,t}'(z)."""
        if not s < t:
            raise ValueError("partial_s needs s < t")
        z = complex(getattr(z, "value", z))
        _, v = self.evolve_with_derivative(z, s, t)
        g = complex(self.field(np.array([z]), s, s)[0])
        return -g * v

    def evolve_grid(self, points, s, t, with_derivative=False):
        return evolve_grid(self, points, s, t, with_derivative)


@dataclass
class GridResult:
    """Element-wise images of a point list; failed points hold NaN."""

    values: np.ndarray
    derivatives: object = None
    failures: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]


def evolve(h, z, s, t, trajectory=False):
    return h.evolve(z, s, t, trajectory)


def evolve_with_derivative(h, z, s, t):
    return h.evolve_with_derivative(z, s, t)


def partial_s(h, z, s, t):
    return h.partial_s(z, s, t)


def evolve_grid(h, points, s, t, with_derivative=False):
    """Evolve every point; points that fail are retried alone and recorded."""
    pts = np.array([complex(getattr(p, "value", p)) for p in points], dtype=complex)
    n = pts.size
    vals = np.full(n, np.nan, dtype=complex)
    ders = np.full(n, np.nan, dtype=complex) if with_derivative else None
    failures = {}
    if n == 0:
        return GridResult(vals, ders, failures)

    def run(idx):
        if with_derivative:
            w, v = h.evolve_with_derivative_array(pts[idx], s, t)
            vals[idx], ders[idx] = w, v
        else:
            vals[idx] = h.evolve_array(pts[idx], s, t)[0]

    try:
        run(np.arange(n))
    except NumericalFailure:
        for i in range(n):
            try:
                run(np.array([i]))
            except NumericalFailure as exc:
                failures[i] = exc
    return GridResult(vals, ders, failures)


def halfplane_evolve(P, w, s, t, options=SolverOptions(), trajectory=False):
    """Solve w' = P(w, t) in the right half-plane from (w, s) to time t."""
    _check_times(s, t)
    w = complex(getattr(w, "value", w))
    if not w.real > 0:
        raise ValueError("initial point must lie in the right half-plane")
    margin = options.boundary_margin
    y, times, states, dense = _solve(lambda tt, y, a: P(y, tt, a), np.array([w]), s, t,
                                    P.breakpoints, options, lambda y: y.real > margin,
                                    trajectory)
    if not trajectory:
        return complex(y[0])
    traj = Trajectory(np.array(times), np.array([x[0] for x in states]),
                      _first_component(dense),
                      {"field": P.kind, "z": w, "s": s, "options": options.digest()})
    return complex(y[0]), traj


def halfplane_evolve_array(P, w, s, t, options=SolverOptions()):
    _check_times(s, t)
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    margin = options.boundary_margin
    return _solve(lambda tt, y, a: P(y, tt, a), w, s, t, P.breakpoints, options,
                  lambda y: y.real > margin)[0]


def _panels(s, e, breakpoints, n_min):
    edges = _segments(s, e, breakpoints)
    length = e - s
    out = []
    for a, b in zip(edges, edges[1:]):
        k = max(1, int(math.ceil(n_min * (b - a) / length)))
        grid = np.linspace(a, b, k + 1)
        out.extend((grid[i], grid[i + 1], a) for i in range(k))
    return out


def _picard_sweep(G, z, tnodes, anchors, x):
    """One application of the Picard map on the panel nodes."""
    f = np.empty_like(x)
    for j, anc in enumerate(anchors):
        for c in range(3):
            f[j, c] = G(np.array([x[j, c]]), tnodes[j, c], anc)[0]
    hw = tnodes[:, 2] - tnodes[:, 0]
    full = hw / 6.0 * (f[:, 0] + 4.0 * f[:, 1] + f[:, 2])
    half = hw / 24.0 * (5.0 * f[:, 0] + 8.0 * f[:, 1] - f[:, 2])
    start = z + np.concatenate([[0.0], np.cumsum(full)[:-1]])
    return np.stack([start, start + half, start + full], axis=1)


def tube_contraction(G, x, tnodes, anchors, radius, delta, n_theta=16):
    """delta * sup |G'| over the tube of ``radius`` around the node values ``x``.

    The supremum is sampled on circles about each node (maximum modulus).
    """
    circle = np.exp(2j * np.pi * np.arange(n_theta) / n_theta)
    if np.max(np.abs(x)) + radius >= 1.0 - 1e-3:
        raise ContractionFailure("Picard tube reaches the unit circle")
    lip = 0.0
    for j, anc in enumerate(anchors):
        for c in range(3):
            d = field_derivative(G, x[j, c] + radius * circle, tnodes[j, c], anc)
            lip = max(lip, float(np.max(np.abs(d))))
    return 1.05 * lip * delta


def picard_oracle(G, z, s, delta, iterations, panels=64):
    """Fixed-point iterate x_n(s + delta) of x_n(t) = z + int_s^t G(x_{n-1}(u), u) du.

    Each sweep integrates with composite Simpson on ``panels`` panels (split at
    breakpoints); values at panel midpoints use the matching 3-point rule.
    Independent of the Runge-Kutta machinery.

    The contraction hypothesis is certified a posteriori: with res the
    sup-norm change made by one more sweep, the Picard map must have
    Lipschitz constant q = delta sup |G'| < 0.5 on the tube of radius
    2 res around the last iterate.  Then the tube is invariant and holds the
    unique fixed point.

    Raises
    ------
    ContractionFailure
        The iterates leave the disc or q >= 0.5.
    """
    z = complex(getattr(z, "value", z))
    if iterations == 0:
        return z
    pans = _panels(s, s + delta, G.breakpoints, panels)
    a = np.array([p[0] for p in pans])
    b = np.array([p[1] for p in pans])
    anchors = [p[2] for p in pans]
    tnodes = np.stack([a, 0.5 * (a + b), b], axis=1)
    x = np.full(tnodes.shape, z, dtype=complex)
    for _ in range(iterations):
        with np.errstate(all="ignore"):
            x = _picard_sweep(G, z, tnodes, anchors, x)
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) >= 1.0:
            raise ContractionFailure("Picard iterates left the disc")
    res = float(np.max(np.abs(_picard_sweep(G, z, tnodes, anchors, x) - x)))
    q = tube_contraction(G, x, tnodes, anchors, 2.0 * res + 1e-9, delta)
    if q >= 0.5:
        raise ContractionFailure(f"contraction constant {q:.3g} >= 0.5")
    return complex(x[-1, 2])
