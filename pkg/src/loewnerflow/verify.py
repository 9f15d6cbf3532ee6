"""Property checks for evolution families, each producing a VerificationReport.

Sampling is seeded.  Disc points are stratified: equal-area radial strata
with jitter and golden-angle arguments under a random rotation.  Checks that
compare many points over the same time interval are batched: the samples
are grouped into a number of random time windows and every window is one
vectorized solve.
"""
import math
import zlib

import numpy as np

from . import families
from .config import FieldSpec, build_field, load_field
from .errors import (AmbiguousDecomposition, ConfigError, ContractionFailure, LoewnerError,
                     NotAGenerator, NumericalFailure)
from .field import (IDENTITY, BerksonPortaData, bounds, compose_bp, decompose_bp)
from .geometry import rho
from .herglotz import DEFAULT_RADII, _polar_grid, transfer_to_halfplane, user_p, validate_herglotz
from .integrator import EvolutionFamilyHandle, SolverOptions, halfplane_evolve, picard_oracle
from .report import VerificationReport, not_run

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
LADDER_FLOOR = 1e-13


def rng_for(seed, name):
    """Independent generator per (seed, check name)."""
    return np.random.default_rng([int(seed), zlib.crc32(name.encode())])


def sample_disc(n, rng, r_max=0.9):
    """n stratified points in |z| <= r_max."""
    if n <= 0:
        return np.zeros(0, dtype=complex)
    u = (np.arange(n) + rng.random(n)) / n
    r = r_max * np.sqrt(u)
    theta = GOLDEN_ANGLE * np.arange(n) + 2 * np.pi * rng.random()
    perm = rng.permutation(n)
    return (r * np.exp(1j * theta))[perm]


def sample_halfplane(n, rng):
    re = 0.1 + 2.9 * rng.random(n)
    im = -3.0 + 6.0 * rng.random(n)
    return re + 1j * im


def sample_times(rng, horizon, k=2):
    """Sorted k-tuple of times in [0, horizon]."""
    return tuple(np.sort(rng.random(k)) * horizon)


def _windows(n, per_window):
    """Split n samples into groups of at most ``per_window``."""
    out, start = [], 0
    while start < n:
        out.append(slice(start, min(n, start + per_window)))
        start += per_window
    return out


def _handle(target, options=None):
    if isinstance(target, EvolutionFamilyHandle):
        return target if options is None else EvolutionFamilyHandle(
            target.field, options, target.homogeneous)
    if isinstance(target, FieldSpec):
        return EvolutionFamilyHandle(target.disc, options or target.solver)
    return EvolutionFamilyHandle(target, options or SolverOptions())


def _worst(current, defect, info):
    if current is None or defect > current[0]:
        return (float(defect), info)
    return current


def _report(name, worst, tol, samples):
    defect, info = worst if worst is not None else (0.0, {})
    return VerificationReport(name, defect, tol, samples, info)


def check_semigroup(h, horizon=2.0, n_samples=100, seed=0, tol=1e-6, name="semigroup"):
    """EF2: |phi_{s,t}(z) - phi_{u,t}(phi_{s,u}(z))| over seeded (z, s <= u <= t)."""
    h = _handle(h)
    rng = rng_for(seed, "semigroup")
    z = sample_disc(n_samples, rng)
    worst = None
    for sl in _windows(n_samples, 5):
        s, u, t = sample_times(rng, horizon, 3)
        direct = h.evolve_array(z[sl], s, t)[0]
        composed = h.evolve_array(h.evolve_array(z[sl], s, u)[0], u, t)[0]
        d = np.abs(direct - composed)
        j = int(np.argmax(d))
        worst = _worst(worst, d[j], {"z": z[sl][j], "s": s, "u": u, "t": t})
    return _report(name, worst, tol, n_samples)


def check_ladder(h, horizon=2.0, n_samples=100, seed=0, factor=100.0, gain=10.0):
    """Tightening tolerances by ``factor`` must shrink the semigroup defect by ``gain``.

    Defects already at round-off level (below LADDER_FLOOR) cannot shrink
    further and count as converged.
    """
    h = _handle(h)
    loose = check_semigroup(h, horizon, n_samples, seed)
    tight = check_semigroup(_handle(h, h.options.tightened(factor)), horizon, n_samples, seed)
    tol = max(loose.max_defect / gain, LADDER_FLOOR)
    return VerificationReport("ladder", tight.max_defect, tol, 2 * n_samples,
                              {"loose": loose.max_defect, "tight": tight.max_defect,
                               "factor": factor, "worst_tight": tight.worst_case})


def check_contraction(h, horizon=2.0, n_samples=1000, seed=0, tol=1e-9):
    """rho(phi(z), phi(w)) - rho(z, w) <= tol over seeded pairs."""
    h = _handle(h)
    rng = rng_for(seed, "contraction")
    z = sample_disc(n_samples, rng)
    w = sample_disc(n_samples, rng)
    worst = None
    for sl in _windows(n_samples, 50):
        s, t = sample_times(rng, horizon)
        k = sl.stop - sl.start
        img = h.evolve_array(np.concatenate([z[sl], w[sl]]), s, t)[0]
        d = rho(img[:k], img[k:]) - rho(z[sl], w[sl])
        j = int(np.argmax(d))
        worst = _worst(worst, d[j], {"z": z[sl][j], "w": w[sl][j], "s": s, "t": t})
    return _report("contraction", worst, tol, n_samples)


def _window_bounds(G, traj_states, T):
    r = float(np.max(np.abs(np.asarray(traj_states))))
    return bounds(G, min(r, 1.0 - 1e-9), T)


def check_univalence(h, horizon=2.0, n_samples=500, seed=0, tol=1e-10):
    """Gronwall lower bound |phi(z+d) - phi(z)| >= |d| exp(-int lipschitz_bound) on pairs.

    The Lipschitz bound is taken on the smallest disc containing both
    trajectories of each window.  Distinct points must have distinct images.
    """
    h = _handle(h)
    rng = rng_for(seed, "univalence")
    z = sample_disc(n_samples, rng, 0.85)
    d = 10.0 ** rng.uniform(-4, -1, n_samples) * np.exp(2j * np.pi * rng.random(n_samples))
    worst = None
    for sl in _windows(n_samples, 25):
        s, t = sample_times(rng, horizon)
        k = sl.stop - sl.start
        y, _, states, _ = h.evolve_array(np.concatenate([z[sl], z[sl] + d[sl]]), s, t,
                                         record=True)
        fb = _window_bounds(h.field, states, horizon)
        lower = np.abs(d[sl]) * math.exp(-fb.integral("lipschitz", s, t))
        gap = np.abs(y[k:] - y[:k])
        defect = np.where(gap > 0, lower - gap, np.abs(d[sl]))
        j = int(np.argmax(defect))
        worst = _worst(worst, defect[j], {"z": z[sl][j], "h": d[sl][j], "s": s, "t": t,
                                          "lower_bound": lower[j], "gap": gap[j],
                                          "min_gap": float(np.min(gap))})
    return _report("univalence", worst, tol, n_samples)


def check_ef3(h, z_list=None, horizon=2.0, n_samples=200, seed=0, tol=1e-9):
    """EF3: |phi_{s,u}(z) - phi_{s,t}(z)| <= int_u^t wvf3_bound + tol over seeded triples."""
    h = _handle(h)
    rng = rng_for(seed, "ef3")
    z = sample_disc(n_samples, rng) if z_list is None else \
        np.asarray([complex(getattr(v, "value", v)) for v in z_list])
    n = z.size
    worst = None
    for sl in _windows(n, 10):
        s, u, t = sample_times(rng, horizon, 3)
        mid, _, st1, _ = h.evolve_array(z[sl], s, u, record=True)
        end, _, st2, _ = h.evolve_array(mid, u, t, record=True)
        fb = _window_bounds(h.field, list(st1) + list(st2), horizon)
        bound = fb.integral("wvf3", u, t)
        defect = np.abs(mid - end) - bound
        j = int(np.argmax(defect))
        worst = _worst(worst, defect[j], {"z": z[sl][j], "s": s, "u": u, "t": t,
                                          "bound": bound})
    return _report("ef3", worst, tol, n)


def check_derivative(h, horizon=2.0, n_samples=50, seed=0, tol=1e-5, step=1e-6):
    """Variational derivative vs central difference, relative defect."""
    h = _handle(h)
    rng = rng_for(seed, "derivative")
    z = sample_disc(n_samples, rng, 0.8)
    worst = None
    for sl in _windows(n_samples, 10):
        s, t = sample_times(rng, horizon)
        k = sl.stop - sl.start
        _, v = h.evolve_with_derivative_array(z[sl], s, t)
        pm = h.evolve_array(np.concatenate([z[sl] + step, z[sl] - step]), s, t)[0]
        fd = (pm[:k] - pm[k:]) / (2 * step)
        rel = np.abs(v - fd) / np.maximum(np.abs(v), 1e-300)
        j = int(np.argmax(rel))
        worst = _worst(worst, rel[j], {"z": z[sl][j], "s": s, "t": t, "variational": v[j],
                                       "difference": fd[j]})
    return _report("derivative", worst, tol, n_samples)


def check_picard(h, horizon=2.0, n_samples=6, seed=0, tol=1e-7, delta=0.1, iterations=40):
    """Picard-iteration oracle vs the Runge-Kutta solver on [s, s + delta]."""
    h = _handle(h)
    rng = rng_for(seed, "picard")
    z = sample_disc(n_samples, rng, 0.2)
    starts = np.concatenate([[0.0], rng.random(max(n_samples - 1, 0)) *
                             max(horizon - delta, 0.0)])
    worst = None
    for zi, s in zip(z, starts):
        s = float(s)
        oracle = picard_oracle(h.field, zi, s, delta, iterations)
        d = abs(oracle - h.evolve(zi, s, s + delta))
        worst = _worst(worst, d, {"z": zi, "s": s, "delta": delta, "oracle": oracle})
    return _report("picard", worst, tol, n_samples)


def check_homogeneity(h, horizon=2.0, n_samples=50, seed=0, tol=1e-8):
    """Autonomous fields: |phi_{s,t}(z) - phi_{0,t-s}(z)|."""
    h = _handle(h)
    rng = rng_for(seed, "homogeneity")
    z = sample_disc(n_samples, rng)
    worst = None
    for sl in _windows(n_samples, 10):
        s, t = sample_times(rng, horizon)
        d = np.abs(h.evolve_array(z[sl], s, t)[0] - h.evolve_array(z[sl], 0.0, t - s)[0])
        j = int(np.argmax(d))
        worst = _worst(worst, d[j], {"z": z[sl][j], "s": s, "t": t})
    return _report("homogeneity", worst, tol, n_samples)


def skipped(name, reason):
    """A check that does not apply to the field; vacuously passing."""
    return VerificationReport(name, 0.0, 0.0, 0, {"reason": reason}, status="skipped")


class _Context:
    """Per-run state shared by the registered checks."""

    def __init__(self, spec, seed, horizon):
        self.spec = spec
        self.seed = seed
        self.horizon = horizon
        self.handle = EvolutionFamilyHandle(spec.disc, spec.solver)
        self.data = spec.disc.source
        self.snapshots = None

    def sample_times(self):
        n = max(1, int(round(4 * self.horizon)))
        return [self.horizon * i / n for i in range(n + 1)]

    def decompose(self):
        self.snapshots = [(t, decompose_bp(self.spec.disc, t)) for t in self.sample_times()]
        return self.snapshots

    def bp_data(self):
        """Berkson-Porta data: the composed source, or the decomposition of an autonomous field."""
        if self.data is not None:
            return self.data
        if not self.spec.disc.autonomous or self.snapshots is None:
            return None
        snap = self.snapshots[0][1]
        if snap is IDENTITY:
            return None
        return BerksonPortaData(snap.tau, user_p(lambda z, t: snap.p(z), autonomous=True),
                                validate=False)

    def constant_tau(self):
        data = self.bp_data()
        if data is None or not data.tau.is_constant:
            return None
        return complex(data.tau(0.0))


def _run_decompose(ctx):
    snaps = ctx.decompose()
    data = ctx.data
    worst = (0.0, {})
    grid = _polar_grid(DEFAULT_RADII, 64)
    for t, snap in snaps:
        if data is None:
            continue
        g = np.asarray(ctx.spec.disc(grid, t), dtype=complex)
        if snap is IDENTITY:
            d = float(np.max(np.abs(g)))
            info = {"t": t, "identity": True}
        else:
            d_tau = abs(snap.tau - complex(data.tau(t)))
            d_p = float(np.max(np.abs(snap.p(grid) - np.asarray(data.p(grid, t)))))
            d = max(d_tau, d_p)
            info = {"t": t, "tau": snap.tau, "tau_defect": d_tau, "p_defect": d_p}
        if d > worst[0] or not worst[1]:
            worst = (d, info)
    return _report("decompose", worst, 1e-7, len(snaps))


def _run_herglotz(ctx):
    data = ctx.bp_data()
    if data is not None:
        return validate_herglotz(data.p, horizon=ctx.horizon, raise_on_failure=False)
    # time-dependent field without stored data: validate each recovered p(., t)
    worst, samples = None, 0
    for t, snap in ctx.snapshots:
        if snap is IDENTITY:
            continue
        rep = validate_herglotz(user_p(lambda z, _t, s=snap: s.p(z), autonomous=True),
                                times=[t], raise_on_failure=False)
        samples += rep.samples
        worst = _worst(worst, rep.max_defect, dict(rep.worst_case, t=t))
    if worst is None:
        return skipped("herglotz", "field vanishes identically")
    return VerificationReport("herglotz", worst[0], 1.0, samples, worst[1])


def _multiplier_pairs(horizon):
    return [(s, t) for s, t in ((0.0, 1.0), (0.5, 2.0)) if t <= horizon] or [(0.0, horizon)]


def _run_multiplier(ctx):
    tau = ctx.constant_tau()
    if tau is None:
        return skipped("multiplier", "driving point is not constant")
    data = ctx.bp_data()
    tol = 1e-6 if abs(tau) < 1.0 else 1e-3
    worst = None
    pairs = _multiplier_pairs(ctx.horizon)
    for s, t in pairs:
        numeric, formula, d = families.multiplier_check(data, s, t, ctx.spec.solver)
        worst = _worst(worst, d, {"s": s, "t": t, "tau": tau, "numeric": numeric,
                                  "formula": formula})
    return _report("multiplier", worst, tol, len(pairs))


def _run_multiplier_monotone(ctx):
    """Re lambda non-decreasing and non-negative on a time grid.

    At a boundary point lambda comes from an extrapolated angular limit whose
    truncation error grows like |P|^2 / x^4, so the allowed drop is looser.
    """
    tau = ctx.constant_tau()
    if tau is None:
        return skipped("multiplier_monotone", "driving point is not constant")
    tol = 1e-10 if abs(tau) < 1.0 else 1e-8
    data = ctx.bp_data()
    times = np.linspace(0.0, ctx.horizon, 9)
    lam = np.array([families.multiplier_lambda(data, float(t)).real for t in times])
    drops = np.concatenate([[-lam[0]], lam[:-1] - lam[1:]])
    j = int(np.argmax(drops))
    return VerificationReport("multiplier_monotone", max(float(drops[j]), 0.0), tol,
                              len(times), {"t": float(times[j]), "re_lambda": lam.tolist()})


def _run_claim1(ctx):
    if ctx.constant_tau() != 0:
        return skipped("claim1", "driving point is not identically 0")
    data = ctx.bp_data()
    handle = EvolutionFamilyHandle(compose_bp(data) if ctx.data is None else ctx.spec.disc,
                                   ctx.spec.solver)
    rng = rng_for(ctx.seed, "claim1")
    z = sample_disc(50, rng)
    worst = None
    for zi in z:
        s, t = sample_times(rng, ctx.horizon)
        d = families.claim1_residual(handle, zi, s, t)
        worst = _worst(worst, d, {"z": zi, "s": s, "t": t})
    return _report("claim1", worst, 1e-7, z.size)


def _halfplane(ctx):
    if ctx.spec.halfplane is not None:
        return ctx.spec.halfplane
    tau = ctx.constant_tau()
    if tau is None or abs(tau) < 1.0:
        return None
    return transfer_to_halfplane(ctx.bp_data().p, tau)


def _run_claim2(ctx):
    P = _halfplane(ctx)
    if P is None:
        return skipped("claim2", "no boundary fixed point")
    rng = rng_for(ctx.seed, "claim2")
    w = sample_halfplane(50, rng)
    worst = None
    for wi in w:
        s, t = sample_times(rng, ctx.horizon)
        d = families.claim2_residual(P, wi, s, t, ctx.spec.solver)
        worst = _worst(worst, d, {"w": wi, "s": s, "t": t})
    return _report("claim2", worst, 1e-7, w.size)


HYDRO_WINDOWS = ((1.0, 10.0, 100.0), (3.0, 30.0, 300.0), (10.0, 100.0, 1000.0))


def _hydro_pairs(horizon):
    return [(0.0, min(1.0, horizon)), (0.5 * horizon, horizon)]


def _hydro_scale(h, s, t):
    """max(1, sup |h| on [s, t]): the expansion at infinity needs |w| >> |h|."""
    times = np.concatenate([np.linspace(s, t, 65), [b for b in h.breakpoints if s < b < t]])
    return max(1.0, max(abs(h(float(x))) for x in times))


def _run_hydro(ctx):
    if ctx.spec.kind != "chordal_halfplane":
        return skipped("hydro", "field is not chordal")
    worst = None
    for s, t in _hydro_pairs(ctx.horizon):
        c = _hydro_scale(ctx.spec.extra["h"], s, t)
        fit = families.hydrodynamic_coefficients(ctx.spec.halfplane, s, t,
                                                 tuple(c * w for w in HYDRO_WINDOWS[-1]),
                                                 ctx.spec.solver)
        d = abs(fit.a1 - (t - s))
        worst = _worst(worst, d, {"s": s, "t": t, "a0": fit.a0, "a1": fit.a1,
                                  "residual": fit.residual, "window_scale": c})
    return _report("hydro", worst, 1e-3, 2)


def _run_hydro_windows(ctx):
    """|a1 - (t - s)| must decrease as the fit window moves outward."""
    if ctx.spec.kind != "chordal_halfplane":
        return skipped("hydro_windows", "field is not chordal")
    worst = None
    for s, t in _hydro_pairs(ctx.horizon):
        c = _hydro_scale(ctx.spec.extra["h"], s, t)
        errs = [abs(families.hydrodynamic_coefficients(ctx.spec.halfplane, s, t,
                                                       tuple(c * w for w in win),
                                                       ctx.spec.solver).a1 - (t - s))
                for win in HYDRO_WINDOWS]
        rise = max(b - a for a, b in zip(errs, errs[1:]))
        worst = _worst(worst, max(rise, 0.0), {"s": s, "t": t, "errors": errs})
    return _report("hydro_windows", worst, 0.0, 2 * len(HYDRO_WINDOWS))


def _run_homogeneity(ctx):
    if not ctx.spec.disc.autonomous:
        return skipped("homogeneity", "field depends on time")
    return check_homogeneity(ctx.handle, ctx.horizon, seed=ctx.seed)


CHECKS = {
    "decompose": _run_decompose,
    "herglotz": _run_herglotz,
    "semigroup": lambda c: check_semigroup(c.handle, c.horizon, seed=c.seed),
    "ladder": lambda c: check_ladder(c.handle, c.horizon, seed=c.seed),
    "contraction": lambda c: check_contraction(c.handle, c.horizon, seed=c.seed),
    "univalence": lambda c: check_univalence(c.handle, c.horizon, seed=c.seed),
    "ef3": lambda c: check_ef3(c.handle, horizon=c.horizon, seed=c.seed),
    "derivative": lambda c: check_derivative(c.handle, c.horizon, seed=c.seed),
    "picard": lambda c: check_picard(c.handle, c.horizon, seed=c.seed),
    "homogeneity": _run_homogeneity,
    "multiplier": _run_multiplier,
    "multiplier_monotone": _run_multiplier_monotone,
    "claim1": _run_claim1,
    "claim2": _run_claim2,
    "hydro": _run_hydro,
    "hydro_windows": _run_hydro_windows,
}


def parse_suite(suite):
    """Ordered list of check names from "all", a comma list or an iterable."""
    if suite is None or suite == "all":
        return list(CHECKS)
    names = [s.strip() for s in suite.split(",")] if isinstance(suite, str) else list(suite)
    if "all" in names:
        return list(CHECKS)
    unknown = [n for n in names if n not in CHECKS]
    if unknown or not names:
        raise ConfigError(f"unknown suite names {unknown}; known: {sorted(CHECKS)}")
    return [n for n in CHECKS if n in names]


def run_suite(config, suite="all", seed=0, horizon=2.0):
    """Run the selected checks on a configured field.

    ``config`` is a FieldSpec, a field config dict, or a path / JSON text.
    The decomposition stage runs first whenever other checks depend on it;
    if it fails, the remaining checks are reported as not run.
    """
    names = parse_suite(suite)
    spec = config if isinstance(config, FieldSpec) else (
        build_field(config, seed) if isinstance(config, dict) and "kind" in config
        else load_field(config, seed))
    ctx = _Context(spec, seed, horizon)
    reports = []
    try:
        rep = _run_decompose(ctx)
    except (NotAGenerator, AmbiguousDecomposition) as exc:
        failed = VerificationReport("decompose", math.inf, 1e-7, 0,
                                    {"error": type(exc).__name__, "message": str(exc)},
                                    status="fail")
        reports.append(failed)
        reports.extend(not_run(n, "decomposition failed") for n in names if n != "decompose")
        return reports if "decompose" in names else reports[1:]
    if "decompose" in names:
        reports.append(rep)
    for name in names:
        if name == "decompose":
            continue
        try:
            reports.append(CHECKS[name](ctx))
        except (NumericalFailure, ContractionFailure, LoewnerError) as exc:
            reports.append(VerificationReport(name, math.inf, 0.0, 0,
                                              {"error": type(exc).__name__,
                                               "message": str(exc)}, status="error"))
    return reports


def builtin_family_configs():
    """Field configurations of the built-in families used by the test suites."""
    return {
        "linear": {"kind": "polynomial", "coefficients": [0, -1]},
        "radial_koebe": {"kind": "radial", "k": 1},
        "radial_rotating": {"kind": "radial", "k": {"kind": "exponential", "omega": 1.0}},
        "radial_brownian": {"kind": "radial",
                            "k": {"kind": "brownian", "kappa": 2.0, "horizon": 2.0,
                                  "step": 0.02, "seed": 42, "map": "exp"}},
        "rotating_tau": {"kind": "berkson_porta",
                         "tau": {"kind": "exponential", "omega": 1.0},
                         "p": {"kind": "constant", "value": 1}},
        "boundary_hyperbolic": {"kind": "polynomial", "coefficients": [1, 0, -1]},
        "boundary_parabolic": {"kind": "berkson_porta", "tau": 1,
                               "p": {"kind": "constant", "value": 1}},
        "chordal_tent": {"kind": "chordal_halfplane",
                         "h": {"kind": "nodes", "interpolation": "linear",
                               "nodes": [[0, 0], [0.5, "0+1i"], [1.0, "0-0.5i"], [2.0, 0]]}},
        "chordal_brownian": {"kind": "chordal_halfplane",
                             "h": {"kind": "brownian", "kappa": 2.0, "horizon": 2.0,
                                   "step": 0.02, "seed": 7}},
    }


def builtin_families(seed=0, solver=SolverOptions()):
    return {name: build_field(cfg, seed, solver) for name, cfg in builtin_family_configs().items()}
