"""Radial Loewner flow with constant driving k = 1.

The field G(w) = -w (1 + w) / (1 - w) fixes the origin and shrinks the disc
towards it.  Along every trajectory w / (1 + w)^2 decays like exp(-t), so
the flow can be checked against a one-dimensional root find.  The script
prints the solver against that relation, the derivative at the origin
against exp(-t), and how a circle of radius 1/2 is drawn inwards.
"""
import math

import numpy as np

from loewnerflow import (BerksonPortaData, EvolutionFamilyHandle, compose_bp, constant_signal,
                         multiplier_check, radial_p)

data = BerksonPortaData(0, radial_p(constant_signal(1)))
family = EvolutionFamilyHandle(compose_bp(data))

print("t      phi_{0,t}(0.3)        invariant residual")
for t in (0.25, 0.5, 1.0, 2.0):
    w = family.evolve(0.3, 0.0, t)
    resid = abs(w / (1 + w) ** 2 - math.exp(-t) * 0.3 / 1.3 ** 2)
    print(f"{t:4.2f}   {w.real:.15f}   {resid:.1e}")

_, d = family.evolve_with_derivative(0.0, 0.0, 0.5)
print(f"\nphi'(0) at t=0.5: {d.real:.12f}   exp(-0.5) = {math.exp(-0.5):.12f}")
numeric, formula, defect = multiplier_check(data, 0.5, 2.0)
print(f"multiplier over [0.5, 2]: numeric {numeric.real:.12f}, formula {formula.real:.12f}")

circle = 0.5 * np.exp(2j * np.pi * np.arange(100) / 100)
for t in (0.5, 1.0, 2.0):
    image = family.evolve_grid(circle, 0.0, t).values
    print(f"t={t}: image of |z|=0.5 lies in {np.min(np.abs(image)):.4f} <= |w| <= "
          f"{np.max(np.abs(image)):.4f}")
