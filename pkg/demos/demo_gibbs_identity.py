"""Check the dynamic Gibbs identity on arbitrary smooth fields.

The identity E - sum_a (M_a u_a + (K_a u_a - R_a) B_a) - S == 0 is algebraic
in the field derivatives: it holds for ANY smooth space-time fields, not only
solutions of the equations.  Replacing every derivative with a central
difference of step h therefore leaves a pure O(h^2) commutation residual.
This script measures that convergence on random trigonometric fields, and
also reports the six sub-identities whose sum proves the theorem.
"""
import numpy as np

from twofluid import (ClosureParams, SeparableAddedMass,
                      SeparableAddedMassParams, balance_subidentities,
                      gibbs_residual, random_trig_fields)

model = SeparableAddedMass(SeparableAddedMassParams(
    gamma1=2.0, gamma2=1.4, a=0.3))
closures = ClosureParams(k=0.7, kappa=0.4)
rng = np.random.default_rng(20260823)

field = random_trig_fields(rng)
point = (0.37, 0.52)

print("combination residual vs finite-difference step:")
prev = None
for h in (1e-2, 5e-3, 2.5e-3):
    res = gibbs_residual(model, closures, field, point, h)
    line = f"  h = {h:7.4f}:  |residual| = {abs(res.combination):.3e}"
    if prev is not None:
        line += f"   ratio = {prev / abs(res.combination):.3f}"
    prev = abs(res.combination)
    print(line)
print("(ratio 4 means second-order vanishing: the identity is exact)")

print()
print("the six sub-identities at h = 2.5e-3:")
ids = balance_subidentities(model, closures, field, point, 2.5e-3)
labels = {"a": "drag work", "b": "external potentials", "c": "kinetic terms",
          "d": "compression work", "e": "entropy advection",
          "f": "relative-velocity coupling"}
for key, val in ids.items():
    print(f"  {key} ({labels[key]}): {val:+.3e}")
