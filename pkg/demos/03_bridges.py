"""Generalized bridges: pin int_0^t1 f dB to a chosen vector y.

B^y = B - psi (int_0^t1 f dB - y) with psi(u) = alpha_t1 F(u).  The
transform cannot see the difference: Sigma(B^y) = Sigma(B).

Run: python3 demos/03_bridges.py
"""

import numpy as np

from goursat.bridge import BridgeSpec, bridge_values
from goursat.kernel import muntz_kernel
from goursat.paths import RngSpec, TimeGrid, brownian_values, ito_values
from goursat.transform import TransformPlan, transform_values

k = muntz_kernel([0, 1])
grid = TimeGrid.build(1.0, dt=5e-4, eps0=1e-4)
plan = TransformPlan.build(k, grid)
Bv = brownian_values(grid, RngSpec(3), range(5))

for y in [(0.0, 0.0), (1.0, -2.0)]:
    By = bridge_values(BridgeSpec(k.basis, 1.0, y), grid, Bv)
    end = ito_values(plan.weights, By)[:, -1, :]
    gap = np.abs(transform_values(plan, By)[0] - transform_values(plan, Bv)[0]).max()
    print(f"y={y}: endpoints\n{end.round(6) + 0.0}\n  sup |Sigma(B^y) - Sigma(B)| = {gap:.1e}")

# With f = 1 this is the ordinary Brownian bridge from 0 to y at t1.
c = muntz_kernel([0])
By = bridge_values(BridgeSpec(c.basis, 1.0, [0.7]), grid, Bv)
print("f = 1, y = 0.7: B^y(1) =", By[:, -1].round(12))
