"""Command-line front end.

    loewnerflow integrate --field F --z 0.5+0i --s 0 --t 1 [--out traj.jsonl]
    loewnerflow grid      --field F --grid 32x32@0.9 --s 0 --t 1 [--out grid.csv]
    loewnerflow verify    --field F --suite all --seed 0 [--out report.json]
    loewnerflow decompose --field F --t 2 [--out bp.json]
    loewnerflow hydro     --field F --s 0 --t 1 [--out fit.json]

Exit codes: 0 success / all checks passed, 1 verification failure,
2 numerical failure, 3 configuration error.
"""
import argparse
import csv
import io
import json
import math
import re
import sys

import numpy as np

from .config import load_field
from .errors import (AmbiguousDecomposition, ConfigError, DegenerateInput, NotAGenerator,
                     NumericalFailure, QuadratureFailure, ValidationFailure)
from .families import hydrodynamic_coefficients
from .field import IDENTITY, decompose_bp
from .geometry import parse_complex
from .herglotz import DEFAULT_RADII, _polar_grid
from .integrator import EvolutionFamilyHandle
from .report import _jsonable
from .verify import parse_suite, run_suite

EXIT_OK, EXIT_FAILED, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2, 3

_GRID_RE = re.compile(r"^\s*(\d+)x(\d+)@([0-9.eE+-]+)\s*$")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def parse_grid(text):
    """"RxT@rmax" -> (radii, angles) point list: R radii r_max (i+1)/R, T equal angles."""
    m = _GRID_RE.match(text)
    if not m:
        raise ConfigError(f"grid must look like 32x32@0.9, got {text!r}")
    nr, nt, rmax = int(m.group(1)), int(m.group(2)), float(m.group(3))
    if not 0.0 < rmax < 1.0:
        raise ConfigError("grid radius must lie in (0, 1)")
    radii = rmax * (np.arange(nr) + 1.0) / max(nr, 1)
    if nr == 0 or nt == 0:
        return np.zeros(0, dtype=complex)
    return _polar_grid(radii, nt)


def _times(args):
    s, t = args.s, args.t
    if not (math.isfinite(s) and math.isfinite(t)) or not 0.0 <= s <= t:
        raise ConfigError(f"need 0 <= s <= t, got s={s}, t={t}")
    return s, t


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dump(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _resolved(spec, args, **extra):
    cfg = spec.config()
    cfg.update(extra)
    cfg["seed"] = args.seed
    return cfg


def cmd_integrate(args):
    spec = load_field(args.field, args.seed, args.rel_tol, args.abs_tol)
    z = parse_complex(args.z)
    s, t = _times(args)
    if not abs(z) < 1.0:
        raise ConfigError("--z must lie in the unit disc")
    handle = EvolutionFamilyHandle(spec.disc, spec.solver)
    _, traj = handle.evolve(z, s, t, trajectory=True)
    header = {"config": _jsonable(_resolved(spec, args, command="integrate", z=[z.real, z.imag],
                                            s=s, t=t))}
    _emit(json.dumps(header, sort_keys=True) + "\n" + traj.to_jsonl(), args.out)
    return EXIT_OK


def cmd_grid(args):
    spec = load_field(args.field, args.seed, args.rel_tol, args.abs_tol)
    pts = parse_grid(args.grid)
    s, t = _times(args)
    handle = EvolutionFamilyHandle(spec.disc, spec.solver)
    res = handle.evolve_grid(pts, s, t, with_derivative=True)
    buf = io.StringIO()
    cfg = _resolved(spec, args, command="grid", grid=args.grid, s=s, t=t)
    buf.write("# config: " + json.dumps(_jsonable(cfg), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "t", "z_re", "z_im", "phi_re", "phi_im", "dphi_re", "dphi_im"])
    for z, w, v in zip(pts, res.values, res.derivatives):
        writer.writerow([repr(float(x)) for x in (s, t, z.real, z.imag, w.real, w.imag,
                                                  v.real, v.imag)])
    _emit(buf.getvalue(), args.out)
    if res.failures:
        first = next(iter(res.failures.values()))
        print(f"{len(res.failures)} grid points failed: {first}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_verify(args):
    names = parse_suite(args.suite)
    spec = load_field(args.field, args.seed, args.rel_tol, args.abs_tol)
    reports = run_suite(spec, names, args.seed, args.horizon)
    for r in reports:
        print(r.line())
    doc = {"config": _resolved(spec, args, command="verify", suite=names,
                               horizon=args.horizon),
           "seed": args.seed, "passed": all(r.passed for r in reports),
           "reports": [r.to_dict() for r in reports]}
    if args.out is not None:
        _emit(_dump(doc), args.out)
    return EXIT_OK if doc["passed"] else EXIT_FAILED


def cmd_decompose(args):
    spec = load_field(args.field, args.seed, args.rel_tol, args.abs_tol)
    horizon = args.t
    if not (math.isfinite(horizon) and horizon >= 0):
        raise ConfigError("--t must be a non-negative time")
    n = args.samples
    times = [horizon * i / (n - 1) for i in range(n)] if n > 1 else [0.0]
    grid = _polar_grid(DEFAULT_RADII, 16)
    cfg = _resolved(spec, args, command="decompose", t=horizon, samples=n)
    samples, code = [], EXIT_OK
    for t in times:
        try:
            snap = decompose_bp(spec.disc, t)
        except (NotAGenerator, AmbiguousDecomposition) as exc:
            samples.append({"t": t, "error": type(exc).__name__, "message": str(exc)})
            code = EXIT_FAILED
            continue
        if snap is IDENTITY:
            samples.append({"t": t, "identity": True})
        else:
            pv = snap.p(grid)
            samples.append({"t": t, "tau": snap.tau, "boundary": snap.boundary,
                            "p": [[z.real, z.imag, v.real, v.imag] for z, v in zip(grid, pv)]})
    doc = {"config": cfg, "seed": args.seed, "samples": samples,
           "identity": all(s.get("identity", False) for s in samples)}
    _emit(_dump(doc), args.out)
    return code


def cmd_hydro(args):
    spec = load_field(args.field, args.seed, args.rel_tol, args.abs_tol)
    if spec.halfplane is None or spec.kind != "chordal_halfplane":
        raise ConfigError("hydro needs a field of kind chordal_halfplane")
    s, t = _times(args)
    fit = hydrodynamic_coefficients(spec.halfplane, s, t, options=spec.solver)
    doc = fit.to_dict(expected_a1=t - s)
    doc["window"] = list(fit.window)
    doc["config"] = _resolved(spec, args, command="hydro", s=s, t=t)
    doc["seed"] = args.seed
    _emit(_dump(doc), args.out)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="loewnerflow",
                     description="Loewner evolution families from Berkson-Porta data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--field", required=True, help="field config: JSON file or inline JSON")
        p.add_argument("--seed", type=int, default=0, help="seed for all randomness")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--rel-tol", type=float, default=None, dest="rel_tol")
        p.add_argument("--abs-tol", type=float, default=None, dest="abs_tol")

    p = sub.add_parser("integrate", help="trajectory of one point as JSON Lines")
    common(p)
    p.add_argument("--z", required=True, help="complex literal such as 0.5+0i")
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("grid", help="phi and phi' on a polar grid as CSV")
    common(p)
    p.add_argument("--grid", required=True, help="<radii>x<angles>@<r_max>, e.g. 32x32@0.9")
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("verify", help="run the property checks")
    common(p)
    p.add_argument("--suite", default="all", help="'all' or comma-separated check names")
    p.add_argument("--horizon", type=float, default=2.0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", help="recover (tau, p) at sampled times")
    common(p)
    p.add_argument("--t", type=float, default=2.0, help="last sampled time")
    p.add_argument("--samples", type=int, default=9)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("hydro", help="hydrodynamic coefficients of a chordal family")
    common(p)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_hydro)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DegenerateInput, ValidationFailure) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, QuadratureFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
