"""The singular SDE X_t = W_t + int_0^t phi(u) . I_u(X) du.

Every solution is X0 + F Y with the anticipative particular solution X0
and an arbitrary random vector Y.  Y is read back from a path as
lim alpha_t I_t(X).

Run: python3 demos/04_sde.py
"""

import numpy as np

from goursat.basis import alpha_infinity, parse_basis
from goursat.bridge import SolutionSpec, solution_values
from goursat.kernel import goursat_kernel, muntz_kernel
from goursat.paths import RngSpec, brownian_values, map_batches
from goursat.stats import jackknife_cov
from goursat.transform import TransformPlan, XZeroPlan, recover_values, transform_values, x_zero_grid

rng = RngSpec(5)

# X0 needs the driver well beyond T; the horizon is set by the tail of phi phi^T.
b = parse_basis("exp rate=1")
k = goursat_kernel(b)
grid = x_zero_grid(b, 1.0, dt=1e-3, eps0=1e-4)
plan = XZeroPlan.build(k, grid, 1.0)
print(f"driver horizon {grid.end:g}, variance share lost {plan.fraction:.1e}")
X1 = map_batches(lambda i: solution_values(plan, brownian_values(grid, rng, i), np.zeros((len(i), 1)))[:, -1],
                 10000, batch=500)
print(f"Var(X0_1) = {jackknife_cov(X1, X1)}   exact {1 - 2 * (1 - np.exp(-1)) ** 2:.6f}")

# Plant Y and recover it.
mk = muntz_kernel([0, 1])
T = 8.0
# a small eps0 keeps the first-cell error (about 2 sqrt(eps0)) out of the residual below
g8 = x_zero_grid(mk.basis, T, eps0=1e-9)
p8 = XZeroPlan.build(mk, g8, T)
y = np.array([1.0, -2.0])
W = brownian_values(g8, rng, range(200))
X = solution_values(p8, W, np.tile(y, (200, 1)))
hist, times = recover_values(mk.basis, g8.truncate(T), X, T)
for j, t in enumerate(times):
    se = hist[:, j].std(0, ddof=1) / np.sqrt(200)
    print(f"alpha_t I_t(X) at t={t:g}: mean {hist[:, j].mean(0).round(3)} +- {se.round(3)}")

# Each solution solves the equation: its transform is the driver.
S = transform_values(TransformPlan.build(mk, g8.truncate(T)), X[:3])[0]
print("sup |Sigma(X) - W| over 3 paths:", np.abs(S - W[:3, :p8.k]).max().round(4))

# With Y ~ N(0, alpha_inf) independent of W the solution is a Brownian motion.
spec = SolutionSpec(k, "gaussian", a_inf=alpha_infinity(b))
Xg = map_batches(lambda i: solution_values(plan, brownian_values(grid, rng, i), spec.draw(rng, i)),
                 10000, batch=500)
print(f"Gaussian Y: Var(X_1) = {jackknife_cov(Xg[:, -1], Xg[:, -1])}")
