"""From Berkson-Porta data to a field and back.

Three fields: the linear contraction -z, the hyperbolic field 1 - z^2
with its attracting point on the circle, and a field whose boundary zero
travels round the circle as exp(i t).  Each is decomposed again at several times; the
Denjoy-Wolff point of the first two is then read off the flow alone.
"""
import numpy as np

from loewnerflow import (BerksonPortaData, EvolutionFamilyHandle, compose_bp, constant_p,
                         constant_signal, decompose_bp, denjoy_wolff_estimate,
                         exponential_signal, polynomial_field)
from loewnerflow.herglotz import cayley_kernel_p

grid = 0.6 * np.exp(2j * np.pi * np.arange(32) / 32)
one = constant_p(constant_signal(1))
cases = {
    "-z": BerksonPortaData(0, one),
    "1 - z^2": BerksonPortaData(1, cayley_kernel_p(constant_signal(1))),
    "rotating zero": BerksonPortaData(exponential_signal(1.0), one),
}
for name, data in cases.items():
    G = compose_bp(data)
    for t in (0.0, 1.0):
        snap = decompose_bp(G, t)
        p_err = np.max(np.abs(snap.p(grid) - data.p(grid, t)))
        kind = "boundary" if snap.boundary else "interior"
        print(f"{name:14s} t={t}: tau = {snap.tau:.10f} ({kind}), p error {p_err:.1e}")

print()
for name, coeffs in (("-z", [0, -1]), ("1 - z^2", [1, 0, -1])):
    estimate = denjoy_wolff_estimate(EvolutionFamilyHandle(polynomial_field(coeffs)), 0.0)
    print(f"Denjoy-Wolff point of {name}: {estimate:.6f}")
print("zero field:", denjoy_wolff_estimate(EvolutionFamilyHandle(polynomial_field([0])), 0.0))
