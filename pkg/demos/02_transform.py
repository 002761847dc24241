"""The Volterra transform maps Brownian motion to Brownian motion.

Sigma(B)_t = B_t - int_0^t (int_0^s k(s,u) dB_u) ds.  The output is again a
Brownian motion, independent of the Wiener integrals int_0^t f dB that the
transform forgets.

Run: python3 demos/02_transform.py
"""

import numpy as np

from goursat.kernel import constant_kernel, muntz_kernel
from goursat.paths import RngSpec, TimeGrid, brownian_values, ito_values, map_batches
from goursat.stats import independence_test, jackknife_cov
from goursat.transform import TransformPlan, iterate_values, laguerre_values, transform_values

grid = TimeGrid.build(1.0, dt=1e-3, eps0=1e-4)
rng = RngSpec(11)
k = muntz_kernel([0, 1])
plan = TransformPlan.build(k, grid)
times = [0.25, 0.5, 1.0]
idx = [grid.index(t) for t in times]


def batch(paths):
    Bv = brownian_values(grid, rng, paths)
    S = transform_values(plan, Bv)[0]
    I = ito_values(plan.weights, Bv)[:, -1, :]
    return S[:, idx], I, Bv[:, idx]


S, I, Bt = map_batches(batch, 10000, batch=500, threads=4)

print("cov(Sigma(B)_s, Sigma(B)_t) against min(s, t):")
for i, s in enumerate(times):
    for j, t in enumerate(times[i:], i):
        e = jackknife_cov(S[:, i], S[:, j])
        print(f"  s={s:<5} t={t:<5} {e}   target {min(s, t)}")

rep = independence_test(I, S)
print(f"corr(I_1, Sigma(B)): max |z| {rep.max_z:.2f} (band 4)")
print(f"corr(I_1, B) for comparison: min |z| {independence_test(I, Bt).z.min():.1f}")

# Killing the basis: the primitives t and t^2/2 are mapped to zero.
F = k.basis.primitive(grid.times).T
print("sup |Sigma(F_i)|:", np.abs(transform_values(plan, F)[0]).max(axis=1))

# For k = 1/t the m-fold transform has the Laguerre form int L_m(log(t/s)) dB_s.
c = TransformPlan.build(constant_kernel(), grid)
Bv = brownian_values(grid, rng, [0])
for m in (1, 2, 3):
    d = np.abs(iterate_values(c, Bv, m) - laguerre_values(m, grid, Bv)).max()
    print(f"m={m}: sup |Sigma^m(B) - Laguerre form| = {d:.2e}")
