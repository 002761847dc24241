"""Goursat kernels built from a basis, and the identities they satisfy.

Run: python3 demos/01_kernels.py
"""

import numpy as np

from goursat import basis as B
from goursat.kernel import (check_self_reproduction, hardy_apply, muntz_coefficients,
                            muntz_kernel, printed_muntz_coefficients)

# The basis f = (1, s).  Its Gramian on (0, t] is [[t, t^2/2], [t^2/2, t^3/3]].
f = B.parse_basis("power lambda=0; power lambda=1")
print("m_1 =\n", B.gramian(f, 1.0))
print("alpha_1 = m_1^-1 =\n", B.alpha(f, 1.0).round(12))

# For power bases phi(t) = alpha_t f(t) is a_j t^(-lambda_j - 1), and a = alpha_1 (1, 1).
print("closed-form coefficients", muntz_coefficients([0, 1]))
print("alpha_1 row sums        ", B.alpha(f, 1.0).sum(axis=1))
print("other sign convention   ", printed_muntz_coefficients([0, 1]))

# k(t, s) = phi(t) . f(s) reproduces itself: k(t,s) = int_0^s k(t,u) k(s,u) du.
k = muntz_kernel([0, 1])
for t, s in [(1.0, 0.5), (3.0, 0.2), (10.0, 9.0)]:
    r = check_self_reproduction(k, t, s)
    print(f"k({t},{s}) = {float(k(t, s)):+.6f}   residual {r.residual:.1e}")

# alpha_t equals the tail integral of phi phi^T plus its limit at infinity.
for spec in ["power lambda=0; power lambda=1", "exp rate=1"]:
    b = B.parse_basis(spec)
    a_inf = B.alpha_infinity(b)
    res = B.verify_alpha_identity(b, 1.0, 10.0, a_inf.matrix)
    print(f"{spec:32s} alpha_inf={a_inf.matrix.ravel().round(6)}  identity residual "
          f"{np.abs(res).max():.1e}")

# |K g| <= 2 |g|: a Hardy-type bound.  For g = 1 on [0, 1] the constant kernel gives sqrt 2.
print("Hardy ratio, g = 1 on [0,1]:", hardy_apply(muntz_kernel([0]), [0.0, 1.0], [1.0]).ratio)
gen = np.random.default_rng(0)
ratios = []
for _ in range(200):
    nb = gen.integers(1, 30)
    breaks = np.concatenate([[0.0], np.sort(gen.uniform(0, 10, nb))])
    ratios.append(hardy_apply(k, breaks, gen.standard_normal(nb)).ratio)
print(f"max ratio over 200 random step functions: {max(ratios):.4f}")
