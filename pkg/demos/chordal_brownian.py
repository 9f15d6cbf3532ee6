"""Chordal flow in the right half-plane driven by i sqrt(kappa) B(t).

w' = 1 / (w + h(t)) pushes points away from the imaginary axis.  Far from
the driving point the map looks like w + a0 + (t - s) / w; the fit below
recovers the 1/w coefficient on windows moving out to infinity.  This
path wanders to |h| of about 4.7, so the window has to sit well beyond
that before the expansion takes over.  The verification suite then runs
on the same field.
"""
from loewnerflow import build_field, hydrodynamic_coefficients, run_suite

spec = build_field({"kind": "chordal_halfplane",
                    "h": {"kind": "brownian", "kappa": 2.0, "horizon": 2.0, "step": 0.01,
                          "seed": 7}})
h = spec.extra["h"]
print(f"driving path: {len(h.times)} nodes, max |h| = {max(abs(v) for v in h.values):.3f}")

for window in ((1, 10, 100), (10, 100, 1000), (40, 400, 4000)):
    fit = hydrodynamic_coefficients(spec.halfplane, 0.0, 1.0, window)
    print(f"window {window}: a1 = {fit.a1.real:.6f}{fit.a1.imag:+.1e}i   "
          f"|a1 - 1| = {abs(fit.a1 - 1):.1e}")

print()
for report in run_suite(spec, "semigroup,contraction,univalence,claim2,hydro", seed=7):
    print(report.line())
