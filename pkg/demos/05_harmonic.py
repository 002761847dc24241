"""Space-time harmonic functions and the tilted Wiener measure.

h(t, x) = int exp(y.x - y.m_t y / 2) nu(dy) makes h(t, I_t(B)) a
martingale with unit mean; under the measure it defines B becomes
B + F(.) Y with Y ~ nu.

Run: python3 demos/05_harmonic.py
"""

import numpy as np

from goursat.basis import FunctionBasis
from goursat.harmonic import EndpointLaw, harmonic_h, martingale_check, tilted_values
from goursat.paths import RngSpec, TimeGrid, brownian_values, cell_weights, ito_values
from goursat.stats import mean_estimate

rng = RngSpec(9)
f1 = FunctionBasis.powers([0])
law = EndpointLaw.point(0.5)
print("h(1, 0.2) =", float(harmonic_h(f1, law, 1.0, [0.2])))

for t in (0.5, 1.0):
    print(f"E[h({t}, B_{t})] =", martingale_check(f1, law, t, 10000, rng))

f2 = FunctionBasis.powers([0, 1])
gauss = EndpointLaw.gaussian(np.eye(2))
print("E[h(0.5, I)] with N(0, I):", martingale_check(f2, gauss, 0.5, 10000, rng))

# Reweighting by h reproduces the tilted law: compare E[h B_1] with E[B_1 + Y].
grid = TimeGrid.build(1.0, dt=1e-3)
Bv = brownian_values(grid, rng, range(20000))
h = harmonic_h(f1, law, 1.0, ito_values(cell_weights(f1, grid), Bv)[:, -1, :])
tilted, _ = tilted_values(f1, law, grid, rng, range(20000))
print(f"E[h B_1] = {mean_estimate(h * Bv[:, -1])}   E[B_1 + 0.5] = {mean_estimate(tilted[:, -1])}")
