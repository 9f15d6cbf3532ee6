"""Distinguished evolution families and fixed-point diagnostics.

Semigroup families, the multiplier lambda(t) at a common fixed point,
Denjoy-Wolff estimation from short-time difference quotients, the chordal
hydrodynamic expansion, and the two trajectory identities for a fixed
point at 0 (disc) and at infinity (half-plane).
"""
import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, QuadratureFailure
from .field import IDENTITY, compose_bp, decompose_bp, field_from_callable
from .herglotz import _polar_grid, transfer_to_halfplane
from .integrator import (EvolutionFamilyHandle, SolverOptions, _segments, halfplane_evolve,
                         halfplane_evolve_array)


def semigroup_family(G, options=SolverOptions(), check_times=(0.0, 0.731, 2.37)):
    """Evolution family of an autonomous field; phi_{s,t} is computed as phi_{0,t-s}."""
    z = _polar_grid((0.2, 0.5, 0.8), 16)
    ref = np.asarray(G(z, check_times[0]), dtype=complex)
    for t in check_times[1:]:
        if np.max(np.abs(np.asarray(G(z, t), dtype=complex) - ref)) > 1e-14:
            raise ConfigError(f"field depends on time (differs at t={t})")
    return EvolutionFamilyHandle(G, options, homogeneous=True)


@dataclass(frozen=True)
class MultiplierCurve:
    lam: Callable
    kind: str

    def __call__(self, t):
        return self.lam(t)


def _constant_tau(data):
    if not data.tau.is_constant:
        raise ConfigError("the multiplier needs a constant driving point")
    return complex(data.tau(0.0))


def _quad_complex(fn, a, b, breakpoints):
    total = 0.0 + 0.0j
    edges = _segments(a, b, breakpoints)
    for lo, hi in zip(edges, edges[1:]):
        re = quad(lambda x: fn(x).real, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        im = quad(lambda x: fn(x).imag, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        total += complex(re, im)
    return total


_X = np.array([1e2, 1e3, 1e4])


def _lagrange_at_zero(x):
    w = np.ones(len(x))
    for i in range(len(x)):
        for j in range(len(x)):
            if i != j:
                w[i] *= x[j] / (x[j] - x[i])
    return w


_X_WEIGHTS = _lagrange_at_zero(1.0 / _X)


def angular_rate(P, xi, monotone_tol=1e-6):
    """lim Re P(x, xi) / x as x -> +inf, by Richardson extrapolation in 1/x.

    Raises QuadratureFailure when the sampled sequence is not monotone beyond
    ``monotone_tol``.
    """
    f = np.asarray(P(_X.astype(complex), xi), dtype=complex).real / _X
    d1, d2 = f[1] - f[0], f[2] - f[1]
    if d1 * d2 < 0 and min(abs(d1), abs(d2)) > monotone_tol:
        raise QuadratureFailure(f"Re P(x)/x not monotone at t={xi}: {f}")
    return float(_X_WEIGHTS @ f)


def multiplier_lambda(data, t):
    """lambda(t) with phi_{s,t}'(tau) = exp(lambda(s) - lambda(t)) for constant tau.

    Interior tau: (1 - |tau|^2) int_0^t p(tau, xi) dxi.  Boundary tau: the
    integral of the extrapolated angular rate of the half-plane transfer.
    Integrals use adaptive Gauss-Kronrod, split at signal breakpoints.
    """
    tau = _constant_tau(data)
    p = data.p
    if t == 0:
        return 0.0j
    if abs(tau) < 1.0:
        at_tau = np.array([tau])
        integrand = lambda xi: complex(p(at_tau, xi)[0])
        return (1.0 - abs(tau) ** 2) * _quad_complex(integrand, 0.0, t, p.breakpoints)
    P = transfer_to_halfplane(p, tau)
    return _quad_complex(lambda xi: complex(angular_rate(P, xi)), 0.0, t, p.breakpoints)


def multiplier_curve(data):
    kind = "interior" if abs(_constant_tau(data)) < 1.0 else "boundary"
    return MultiplierCurve(lambda t: multiplier_lambda(data, t), kind)


def multiplier_check(data, s, t, options=SolverOptions()):
    """Compare phi_{s,t}'(tau) from the variational equation with exp(lambda(s) - lambda(t)).

    At a boundary tau the numeric side is taken along the radius at
    (1 - eps) tau, eps in {1e-3, 1e-4}, linearly extrapolated to eps = 0.

    Returns (numeric, formula, defect).
    """
    tau = _constant_tau(data)
    h = EvolutionFamilyHandle(compose_bp(data), options)
    if abs(tau) < 1.0:
        numeric = h.evolve_with_derivative(tau, s, t)[1]
    else:
        eps = np.array([1e-3, 1e-4])
        _, v = h.evolve_with_derivative_array((1.0 - eps) * tau, s, t)
        numeric = complex((v[1] * eps[0] - v[0] * eps[1]) / (eps[0] - eps[1]))
    formula = cmath.exp(multiplier_lambda(data, s) - multiplier_lambda(data, t))
    return numeric, formula, abs(numeric - formula)


def _difference_generator(h, s, n):
    def g(z, t):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        # probes close to the circle may trip the boundary guard; they become NaN
        w = h.evolve_grid(flat, s, s + 1.0 / n).values
        return (n * (w - flat)).reshape(z.shape)

    return field_from_callable(g, autonomous=True, name=f"difference_{n}")


def denjoy_wolff_estimate(h, s, orders=(16, 64, 256)):
    """Driving point at time s from the generators n (phi_{s,s+1/n} - id).

    Each difference generator is decomposed; the last two estimates are
    Richardson-combined assuming O(1/n) error.  Diagnostic only.
    """
    estimates = []
    for n in orders:
        snap = decompose_bp(_difference_generator(h, s, n), 0.0)
        if snap is IDENTITY:
            return IDENTITY
        estimates.append(snap.tau)
    a, b = estimates[-2], estimates[-1]
    ratio = orders[-1] / orders[-2]
    tau = (ratio * b - a) / (ratio - 1.0)
    if abs(b) >= 1.0 - 1e-9 or abs(tau) > 1.0:
        tau = tau / abs(tau)
    return complex(tau)


@dataclass(frozen=True)
class HydrodynamicFit:
    a0: complex
    a1: complex
    residual: float
    window: tuple = (10.0, 100.0, 1000.0)

    def to_dict(self, expected_a1=None):
        out = {"a0": [self.a0.real, self.a0.imag], "a1": [self.a1.real, self.a1.imag],
               "residual": self.residual}
        if expected_a1 is not None:
            out["expected_a1"] = expected_a1
        return out


def hydrodynamic_coefficients(P, s, t, window=(10.0, 100.0, 1000.0), options=SolverOptions()):
    """Fit phi_{s,t}(w) - w ~ a0 + a1 / w on real w in ``window``.

    Residuals are weighted by w**2 (the size of the neglected remainder).
    For imaginary driving the w**-2 coefficient of the real-axis expansion is
    purely imaginary (it equals -int h); it is fitted as a nuisance term so
    it does not leak into a1.
    """
    w = np.asarray(window, dtype=float)
    if t == s:
        return HydrodynamicFit(0j, 0j, 0.0, tuple(window))
    y = halfplane_evolve_array(P, w.astype(complex), s, t, options) - w
    x = 1.0 / w
    n = w.size
    A = np.zeros((2 * n, 5))
    A[:n, 0], A[:n, 1] = 1.0, x
    A[n:, 2], A[n:, 3], A[n:, 4] = 1.0, x, x ** 2
    rhs = np.concatenate([y.real, y.imag])
    wt = np.concatenate([w ** 2, w ** 2])
    coef = np.linalg.lstsq(A * wt[:, None], rhs * wt, rcond=None)[0]
    a0 = complex(coef[0], coef[2])
    a1 = complex(coef[1], coef[3])
    resid = A @ coef - rhs
    return HydrodynamicFit(a0, a1, float(np.sqrt(np.sum(resid ** 2))), tuple(window))


def claim1_residual(h, z, s, t):
    """|phi_{s,t}(z) - z exp(-int_s^t p(phi_{s,xi}(z), xi) dxi)| for a field with tau = 0."""
    src = h.field.source
    if src is None or not src.tau.is_constant or src.tau(0.0) != 0:
        raise ConfigError("the radial identity needs Berkson-Porta data with tau = 0")
    p = src.p
    z = complex(getattr(z, "value", z))
    phi, traj = h.evolve(z, s, t, trajectory=True)
    integral = traj.simpson(lambda xi, w, a: complex(p(np.array([w]), xi, a)[0]))
    return abs(phi - z * cmath.exp(-integral))


def claim2_residual(P, w, s, t, options=SolverOptions()):
    """|Re phi_{s,t}(w) - Re w exp(int_s^t Re P(phi)/Re phi dxi)| in the half-plane."""
    phi, traj = halfplane_evolve(P, w, s, t, options, trajectory=True)
    integral = traj.simpson(
        lambda xi, u, a: complex(P(np.array([u]), xi, a)[0]).real / u.real)
    return abs(phi.real - complex(w).real * math.exp(integral))
