"""Adaptive quadrature used throughout the package.

Thin layer over QUADPACK (``scipy.integrate.quad`` / ``quad_vec``) that adds
an endpoint-singularity substitution for integrands behaving like ``s**p``
near 0, turns silent non-convergence into :class:`QuadratureError`, and a
fixed Gauss-Legendre rule for cell averages of smooth functions.
"""

import warnings

import numpy as np
from scipy import integrate

from .errors import QuadratureError

DEFAULT_TOL = 1e-10
DEFAULT_LIMIT = 400

_GL_CACHE = {}


def _substitute(fn, p):
    """Map ``int_0^b fn(s) ds`` to ``int_0^{b**(1/k)} fn(v**k) k v**(k-1) dv``.

    With ``k = 1/(p+1)`` an integrand ``~ s**p`` becomes bounded near 0.
    """
    k = 1.0 / (p + 1.0)

    def g(v):
        return fn(v**k) * k * v ** (k - 1.0)

    return g, k


def quadrature(fn, a, b, tol=DEFAULT_TOL, *, singular_power=None, points=None,
               abs_tol=1e-14, limit=DEFAULT_LIMIT):
    """Integrate a scalar function over ``[a, b]``.

    Parameters
    ----------
    fn : callable
        Scalar integrand, finite on the open interval.
    a, b : float
        Limits; ``b`` may be ``np.inf`` (handled by QUADPACK's tail mapping).
    tol : float
        Relative tolerance.
    singular_power : float, optional
        Exponent ``p > -1`` of the integrand's behaviour ``s**p`` at ``a == 0``.
        When negative, the power substitution is applied.
    points : sequence of float, optional
        Interior break points (kinks, table knots).

    Raises
    ------
    QuadratureError
        If the adaptive scheme does not meet the tolerance within ``limit``
        subdivisions.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if singular_power is not None and singular_power <= -1.0:
        raise ValueError("singular_power must exceed -1 for an integrable singularity")

    if singular_power is not None and singular_power < 0.0 and a == 0.0 and np.isfinite(b):
        g, k = _substitute(fn, singular_power)
        lo, hi = 0.0, b ** (1.0 / k)
        pts = None if points is None else [p ** (1.0 / k) for p in points if 0.0 < p < b]
    else:
        g, lo, hi = fn, a, b
        pts = None if points is None else [p for p in points if a < p < b]
    if not np.isfinite(hi):
        pts = None  # QUADPACK's infinite-range routine takes no break points
    if pts is not None and len(pts) == 0:
        pts = None

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(g, lo, hi, epsabs=abs_tol, epsrel=tol,
                                        limit=limit, points=pts)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {exc}") from exc
    if not np.isfinite(value):
        raise QuadratureError(f"non-finite quadrature value on [{a}, {b}]")
    return value


def quadrature_vec(fn, a, b, tol=DEFAULT_TOL, abs_tol=1e-14):
    """Integrate an array-valued function (adaptive, max-norm error control)."""
    value, err = integrate.quad_vec(fn, float(a), float(b), epsabs=abs_tol,
                                    epsrel=tol, norm="max", limit=2000)
    if not np.all(np.isfinite(value)):
        raise QuadratureError(f"non-finite vector quadrature on [{a}, {b}]")
    scale = max(abs_tol, tol * float(np.max(np.abs(value))))
    if err > 1e3 * scale:
        raise QuadratureError(f"vector quadrature on [{a}, {b}] error {err:.3e} above budget")
    return value


def gauss_legendre(order):
    """Nodes and weights on [0, 1]."""
    if order not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = (0.5 * (x + 1.0), 0.5 * w)
    return _GL_CACHE[order]


def cell_averages(fn, edges, order=8):
    """Average of ``fn`` over each cell ``[edges[i], edges[i+1]]``.

    ``fn`` must accept an array of times and return shape ``(len, ...)``.
    A fixed Gauss-Legendre rule is exact for polynomials up to degree
    ``2*order - 1``; cells must avoid integrable singularities.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(order)
    lo = edges[:-1]
    width = np.diff(edges)
    nodes = lo[:, None] + width[:, None] * x[None, :]
    vals = np.asarray(fn(nodes.ravel()))
    vals = vals.reshape(nodes.shape + vals.shape[1:])
    return np.tensordot(w, vals, axes=([0], [1]))
