"""JSON field configurations.

A configuration is either a field object or ``{"field": {...}, "solver": {...}}``.
Field kinds:

    {"kind": "berkson_porta", "tau": <signal>, "p": <p>}
    {"kind": "radial", "k": <signal>}                      tau = 0, p = radial kernel
    {"kind": "chordal_halfplane", "h": <signal>}           P(w, t) = 1/(w + h(t))
    {"kind": "polynomial", "coefficients": [a0, a1, ...]}  autonomous sum a_j z^j

Herglotz functions ``<p>`` have kinds constant (``value``), cayley_kernel
(``k``), chordal (``h``, optional ``tau``) and table (``times``,
``coefficients``).  A ``<signal>`` is a complex literal, a number, an
``[re, im]`` pair, or an object:

    {"kind": "constant", "value": ...}
    {"kind": "exponential", "omega": w}                    exp(i w t)
    {"kind": "nodes", "nodes": [[t, v], ...], "interpolation": "hold_left" | "linear"}
    {"kind": "brownian", "kappa": k, "horizon": T, "step": dt, "seed": n, "map": "identity" | "exp"}

``map: "exp"`` turns the imaginary Brownian path i x(t) into exp(i x(t)),
a unimodular radial driving function.  A missing Brownian seed takes the
run's seed.  :func:`load_field` returns the objects together with the
configuration with every default filled in.
"""
import cmath
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

from .errors import ConfigError, LoewnerError
from .field import BerksonPortaData, HerglotzVectorField, compose_bp, polynomial_field
from .geometry import parse_complex
from .herglotz import (HalfPlaneField, PiecewiseSignal, brownian_driving, cayley_kernel_p,
                       chordal_field, chordal_p, constant_p, exponential_signal, radial_p,
                       table_p)
from .integrator import SolverOptions


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """A configured field: the disc field, its half-plane form if any, and the resolved config."""

    disc: HerglotzVectorField
    halfplane: Optional[HalfPlaneField]
    resolved: dict
    solver: SolverOptions = SolverOptions()
    kind: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def data(self):
        return self.disc.source

    def config(self):
        return {"field": self.resolved, "solver": asdict(self.solver)}


def parse_value(v):
    """Complex from a number, an ``[re, im]`` pair or an "a+bi" literal."""
    if isinstance(v, bool):
        raise ConfigError(f"not a complex value: {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        return parse_complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(v[0], v[1])
    raise ConfigError(f"not a complex value: {v!r}")


def _pair(z):
    return [z.real, z.imag]


def _require(obj, key, where):
    if key not in obj:
        raise ConfigError(f"{where}: missing key {key!r}")
    return obj[key]


def parse_signal(obj, seed=0, where="signal"):
    """Build a signal; returns (signal, resolved config)."""
    if not isinstance(obj, dict):
        v = parse_value(obj)
        return PiecewiseSignal((0.0,), (v,), analytic_kind="constant"), \
            {"kind": "constant", "value": _pair(v)}
    kind = obj.get("kind", "nodes" if "nodes" in obj else None)
    if kind == "constant":
        v = parse_value(_require(obj, "value", where))
        return PiecewiseSignal((0.0,), (v,), analytic_kind="constant"), \
            {"kind": "constant", "value": _pair(v)}
    if kind == "exponential":
        omega = float(_require(obj, "omega", where))
        return exponential_signal(omega), {"kind": "exponential", "omega": omega}
    if kind == "nodes":
        nodes = _require(obj, "nodes", where)
        interp = obj.get("interpolation", "hold_left")
        try:
            times = [float(t) for t, _ in nodes]
            values = [parse_value(v) for _, v in nodes]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: nodes must be [time, value] pairs") from exc
        sig = PiecewiseSignal(tuple(times), tuple(values), interp)
        return sig, {"kind": "nodes", "interpolation": interp,
                     "nodes": [[t, _pair(v)] for t, v in zip(sig.times, sig.values)]}
    if kind == "brownian":
        res = {"kind": "brownian", "kappa": float(_require(obj, "kappa", where)),
               "horizon": float(obj.get("horizon", 2.0)), "step": float(obj.get("step", 0.01)),
               "seed": int(obj.get("seed", seed)), "map": obj.get("map", "identity")}
        sig = brownian_driving(res["kappa"], res["horizon"], res["step"], res["seed"])
        if res["map"] == "exp":
            sig = sig.map_values(cmath.exp)
        elif res["map"] != "identity":
            raise ConfigError(f"{where}: unknown map {res['map']!r}")
        return sig, res
    raise ConfigError(f"{where}: unknown signal kind {kind!r}")


def parse_p(obj, seed=0):
    """Build a Herglotz function; returns (p, resolved config)."""
    if not isinstance(obj, dict):
        raise ConfigError("p must be an object with a 'kind'")
    kind = obj.get("kind")
    if kind == "constant":
        sig, res = parse_signal(_require(obj, "value", "p"), seed, "p.value")
        return constant_p(sig), {"kind": kind, "value": res}
    if kind == "cayley_kernel":
        sig, res = parse_signal(_require(obj, "k", "p"), seed, "p.k")
        return cayley_kernel_p(sig), {"kind": kind, "k": res}
    if kind == "chordal":
        sig, res = parse_signal(_require(obj, "h", "p"), seed, "p.h")
        tau = parse_value(obj.get("tau", 1.0))
        return chordal_p(sig, tau), {"kind": kind, "h": res, "tau": _pair(tau)}
    if kind == "table":
        times = [float(t) for t in _require(obj, "times", "p")]
        coeffs = [[parse_value(c) for c in row] for row in _require(obj, "coefficients", "p")]
        return table_p(times, coeffs), {"kind": kind, "times": times,
                                        "coefficients": [[_pair(c) for c in row]
                                                         for row in coeffs]}
    raise ConfigError(f"unknown Herglotz function kind {kind!r}")


def build_field(obj, seed=0, solver=SolverOptions()):
    """FieldSpec from a field configuration object."""
    if not isinstance(obj, dict):
        raise ConfigError("field config must be a JSON object")
    kind = obj.get("kind")
    try:
        if kind == "berkson_porta":
            tau, tau_res = parse_signal(_require(obj, "tau", "field"), seed, "tau")
            p, p_res = parse_p(_require(obj, "p", "field"), seed)
            data = BerksonPortaData(tau, p)
            return FieldSpec(compose_bp(data), None,
                             {"kind": kind, "tau": tau_res, "p": p_res}, solver, kind)
        if kind == "radial":
            k, k_res = parse_signal(_require(obj, "k", "field"), seed, "k")
            data = BerksonPortaData(0.0, radial_p(k))
            return FieldSpec(compose_bp(data, "radial"), None, {"kind": kind, "k": k_res},
                             solver, kind)
        if kind == "chordal_halfplane":
            h, h_res = parse_signal(_require(obj, "h", "field"), seed, "h")
            data = BerksonPortaData(1.0, chordal_p(h))
            return FieldSpec(compose_bp(data, "chordal"), chordal_field(h),
                             {"kind": kind, "h": h_res}, solver, kind, {"h": h})
        if kind == "polynomial":
            coeffs = [parse_value(c) for c in _require(obj, "coefficients", "field")]
            return FieldSpec(polynomial_field(coeffs), None,
                             {"kind": kind, "coefficients": [_pair(c) for c in coeffs]},
                             solver, kind)
    except LoewnerError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid field: {exc}") from exc
    raise ConfigError(f"unknown field kind {kind!r}")


def parse_solver(obj, base=SolverOptions()):
    if obj is None:
        return base
    if not isinstance(obj, dict):
        raise ConfigError("solver must be an object")
    known = asdict(base)
    unknown = set(obj) - set(known)
    if unknown:
        raise ConfigError(f"unknown solver options {sorted(unknown)}")
    known.update(obj)
    try:
        known["max_steps"] = int(known["max_steps"])
        return SolverOptions(**{k: v if k == "max_steps" else float(v) for k, v in known.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad solver options: {exc}") from exc


def load_field(source, seed=0, rel_tol=None, abs_tol=None):
    """FieldSpec from a path, JSON text or dict.  Tolerance arguments override the file."""
    if isinstance(source, dict):
        obj = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            try:
                with open(text, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read field config: {exc}") from exc
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"field config is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("field config must be a JSON object")
    field_obj = obj.get("field", obj) if "kind" not in obj else obj
    solver = parse_solver(obj.get("solver") if "kind" not in obj else None)
    overrides = {}
    if rel_tol is not None:
        overrides["rel_tol"] = rel_tol
    if abs_tol is not None:
        overrides["abs_tol"] = abs_tol
    if overrides:
        solver = parse_solver(overrides, solver)
    return build_field(field_obj, seed, solver)
