"""The Volterra transform on discretized paths, and the objects built from it.

``Sigma(X)_t = X_t - int_0^t g(u) du`` with ``g(u) = phi(u) . I_u(X)``: the
Goursat factorization means the inner stochastic integral is the running
vector ``I`` and is computed once per path.

Every operation is evaluated exactly on the piecewise-linear interpolant of
the path through ``(0, 0)`` and the grid values, which for Brownian input is
the conditional mean given the grid.  Inside a cell ``[a, b]`` this makes
``I_u = I_a + (F(u) - F(a)) dx / h``, so the drift of the cell is
``P_k . I_a + G_k dx / h`` with ``P_k = int_a^b phi`` and
``G_k = int_a^b phi . (F - F(a))``.  The first cell ``(0, eps0]`` is the case
``a = 0``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import eval_laguerre, factorial

from . import basis as _basis
from .errors import NumericalError, TruncationError
from .kernel import GoursatKernel
from .paths import SamplePath, TimeGrid, cell_weights, increments, ito_values
from .quadrature import gauss_legendre, quadrature

TRUNCATION_TOL = 1e-2
GL_ORDER = 10


@dataclass(frozen=True, eq=False)
class TransformReport:
    """Output of :func:`volterra_transform`.

    ``convergence`` is the sup-distance between the drift on the full grid
    and on every second grid point; ``near_zero`` is the drift over
    ``(0, eps0]``, already part of ``path``.
    """

    path: SamplePath
    convergence: float
    near_zero: float
    eps0: float


def cell_moments(kernel, nodes, order=GL_ORDER):
    """``P_k = int phi`` and ``G_k = int phi . (F - F(t_k))`` over ``[t_k, t_{k+1}]``."""
    nodes = np.asarray(nodes, dtype=float)
    x, w = gauss_legendre(order)
    lo = nodes[:-1]
    h = np.diff(nodes)
    u = (lo[:, None] + h[:, None] * x).ravel()
    ph = kernel.phi(u).reshape(lo.size, x.size, -1)
    dF = kernel.basis.primitive(u).reshape(ph.shape) - kernel.basis.primitive(lo)[:, None, :]
    P = np.einsum("j,kji->ki", w, ph) * h[:, None]
    G = np.einsum("j,kji,kji->k", w, ph, dF) * h
    return P, G


def first_cell_moment(kernel, eps0):
    """``int_0^eps0 phi . F``; bounded integrand for kernels that reproduce their basis."""
    basis = kernel.basis

    def fn(u):
        u = np.array([u])
        return float(np.sum(kernel.phi(u) * basis.primitive(u)))

    return quadrature(fn, 0.0, eps0, tol=1e-10)


def _check(*arrays):
    if not all(np.all(np.isfinite(np.asarray(a))) for a in arrays):
        raise NumericalError("non-finite kernel factor on the grid")


@dataclass(frozen=True, eq=False)
class TransformPlan:
    """Path-independent weights of the transform on one grid.

    ``P, G`` belong to the cells between consecutive grid points,
    ``coarse_P, coarse_G`` to the cells joining every second point and
    ``first`` to ``(0, eps0]``.
    """

    kernel: GoursatKernel
    grid: TimeGrid
    weights: np.ndarray
    P: np.ndarray
    G: np.ndarray
    coarse_P: np.ndarray
    coarse_G: np.ndarray
    first: float

    @classmethod
    def build(cls, kernel, grid):
        t = grid.times
        P, G = cell_moments(kernel, t)
        cP, cG = cell_moments(kernel, t[::2])
        first = first_cell_moment(kernel, float(t[0]))
        _check(P, G, cP, cG, first)
        return cls(kernel, grid, cell_weights(kernel.basis, grid), P, G, cP, cG, first)


def _drift(I, x, times, P, G, first):
    """Running drift at ``times`` for nodal ``I`` (time on axis -2) and path ``x``."""
    Ia = I[..., :-1, :]
    slope = np.diff(x, axis=-1) / np.diff(times)
    cell = np.einsum("...ki,ki->...k", Ia, P) + slope * G
    start = first * x[..., 0] / times[0]
    out = np.empty(x.shape)
    out[..., 0] = start
    out[..., 1:] = start[..., None] + np.cumsum(cell, axis=-1)
    return out


def transform_values(plan, values):
    """Array version of :func:`volterra_transform`.

    ``values`` has paths on leading axes and time on the last.  Returns
    ``(output, convergence, near_zero)``; ``near_zero`` has the leading
    shape of ``values``.
    """
    x = np.asarray(values, dtype=float)
    t = plan.grid.times
    I = ito_values(plan.weights, x)
    drift = _drift(I, x, t, plan.P, plan.G, plan.first)
    if not np.all(np.isfinite(drift)):
        raise NumericalError("non-finite drift")
    coarse = _drift(I[..., ::2, :], x[..., ::2], t[::2], plan.coarse_P, plan.coarse_G, plan.first)
    conv = float(np.max(np.abs(coarse - drift[..., ::2]))) if x.size else 0.0
    return x - drift, conv, drift[..., 0]


def volterra_transform(kernel: GoursatKernel, path: SamplePath, plan=None):
    """``Sigma(X)`` on the path's grid.

    Examples
    --------
    >>> from goursat.kernel import constant_kernel
    >>> from goursat.paths import TimeGrid, SamplePath
    >>> g = TimeGrid.build(1.0)
    >>> out = volterra_transform(constant_kernel(), SamplePath(g, g.times, "deterministic"))
    >>> bool(abs(out.path.values).max() < 1e-12)
    True
    """
    if plan is None:
        plan = TransformPlan.build(kernel, path.grid)
    out, conv, near = transform_values(plan, path.values)
    return TransformReport(SamplePath(path.grid, out, "transformed"), conv, float(near),
                           path.grid.eps0)


def iterate_values(plan, values, m):
    if m < 0:
        raise ValueError("iteration count must be non-negative")
    out = np.asarray(values, dtype=float)
    for _ in range(m):
        out = transform_values(plan, out)[0]
    return out


def iterate_transform(kernel, path, m, plan=None):
    """``m``-fold composition of the transform; ``m = 0`` returns the input."""
    if m == 0:
        return path
    plan = TransformPlan.build(kernel, path.grid) if plan is None else plan
    return SamplePath(path.grid, iterate_values(plan, path.values, m), "transformed")


# -- Laguerre closed form -----------------------------------------------------

def laguerre_coefficients(n):
    """Coefficients ``c_k`` of ``L_n(x) = sum_k c_k x**k``."""
    k = np.arange(n + 1)
    return (-1.0) ** k * np.array([float(np.prod(np.arange(n - j + 1, n + 1))) for j in k]) \
        / factorial(k) ** 2


def _log_moments(edges, j):
    """Cell averages of ``(log s)**j`` over consecutive ``edges`` (first edge may be 0).

    Uses ``int (log s)^j ds = s sum_i (-1)^(j-i) j!/i! (log s)^i``.
    """
    e = np.asarray(edges, dtype=float)
    with np.errstate(divide="ignore"):
        L = np.log(e)
    prim = np.zeros_like(e)
    for i in range(j + 1):
        c = (-1.0) ** (j - i) * factorial(j) / factorial(i)
        term = e * np.where(e > 0, L, 0.0) ** i
        prim += c * np.where(e > 0, term, 0.0)
    return np.diff(prim) / np.diff(e)


def laguerre_values(n, grid, values):
    """``int_0^t L_n(log(t/s)) dx_s`` with exact cell averages in ``s``.

    ``L_n(log t - log s)`` is expanded in powers of ``log s``, so each power
    needs one running Wiener sum and the cost is ``O(n^2 M)``.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    c = laguerre_coefficients(n)
    e = grid.edges
    dx = increments(values)
    logt = np.log(grid.times)
    out = np.zeros_like(dx)
    # (log t - log s)^k = sum_j C(k, j) (log t)^(k-j) (-log s)^j
    sums = [np.cumsum(dx * _log_moments(e, j), axis=-1) for j in range(n + 1)]
    for k in range(n + 1):
        for j in range(k + 1):
            binom = factorial(k) / (factorial(j) * factorial(k - j))
            out += c[k] * binom * logt ** (k - j) * (-1.0) ** j * sums[j]
    return out


def laguerre_direct(n, path):
    """``int_0^. L_n(log(./s)) dB_s``: the ``n``-th iterate of the ``1/t`` transform."""
    return SamplePath(path.grid, laguerre_values(n, path.grid, path.values), "transformed")


def laguerre(n, x):
    return eval_laguerre(n, x)


# -- the particular solution X0 -----------------------------------------------

def truncation_fraction(basis, T, tmax):
    """Largest share of ``Var(X0_t)``, ``t <= T``, carried by ``int_tmax^inf phi dW``.

    The omitted piece is ``F(t) . int_tmax^inf phi dW`` with variance
    ``F(t)^T tail F(t)``; it is compared with ``t`` at 64 times in ``(0, T]``.
    """
    tail = _basis.phi_tail(basis, tmax)
    t = np.linspace(T / 64, T, 64)
    F = basis.primitive(t)
    var = np.einsum("ki,ij,kj->k", F, tail, F)
    return float(np.max(var / t))


def x_zero_horizon(basis, T, tol=TRUNCATION_TOL, start=10.0, max_doublings=30):
    """Smallest ``tmax = start T 2^k`` whose truncation fraction is below ``tol``."""
    tmax = start * T
    for _ in range(max_doublings):
        if truncation_fraction(basis, T, tmax) <= tol:
            return tmax
        tmax *= 2.0
    raise TruncationError(f"no horizon up to {tmax:g} meets truncation tolerance {tol:g}")


def x_zero_grid(basis, T, dt=None, eps0=None, tol=TRUNCATION_TOL, tail_ratio=1.1):
    """Grid on ``[eps0, tmax]``: fine up to ``T``, geometric tail beyond."""
    tmax = x_zero_horizon(basis, T, tol)
    return TimeGrid.build(T, dt=dt, eps0=eps0, tail_end=tmax, tail_ratio=tail_ratio)


@dataclass(frozen=True, eq=False)
class XZeroPlan:
    """Path-independent pieces of :func:`x_zero` on a fixed grid.

    ``phi_avg`` are cell averages of ``phi`` over the whole grid (the first
    cell never enters ``R``); ``F``, ``G`` and ``first`` are the primitive
    and the cell moments up to ``T``.
    """

    kernel: GoursatKernel
    grid: TimeGrid
    T: float
    k: int
    fraction: float
    phi_avg: np.ndarray
    F: np.ndarray
    G: np.ndarray
    first: float

    @classmethod
    def build(cls, kernel, grid, T=None, tol=TRUNCATION_TOL):
        basis = kernel.basis
        T = grid.horizon if T is None else float(T)
        tmax = grid.end
        if tmax < 10.0 * T * (1 - 1e-12):
            raise TruncationError(f"integration horizon {tmax:g} is below 10 T = {10 * T:g}")
        frac = truncation_fraction(basis, T, tmax)
        if frac > tol:
            raise TruncationError(
                f"tail beyond {tmax:g} carries {frac:.3g} of the variance (tolerance {tol:g}); "
                f"use a horizon of at least {x_zero_horizon(basis, T, tol):g}")
        k = grid.index(T) + 1
        t = grid.times
        P, _ = cell_moments(kernel, t)
        avg = np.zeros((len(grid), basis.n))
        avg[1:] = P / np.diff(t)[:, None]
        _, G = cell_moments(kernel, t[:k])
        first = first_cell_moment(kernel, float(t[0]))
        _check(avg, G, first)
        return cls(kernel, grid, T, k, frac, avg, basis.primitive(t[:k]), G, first)


def x_zero_values(plan, W):
    """Array version of :func:`x_zero`; values on the grid points ``<= T``.

    With ``W`` linear inside a cell ``[a, b]``, ``R_u = R_b + (dW / h) int_u^b phi``
    and the cell contributes ``R_b . (F(b) - F(a)) + G dW / h`` to the drift.
    """
    W = np.asarray(W, dtype=float)
    k = plan.k
    t = plan.grid.times
    contrib = increments(W)[..., None] * plan.phi_avg
    rev = np.cumsum(contrib[..., ::-1, :], axis=-2)[..., ::-1, :]
    # R at node j sums the cells after it
    R = np.concatenate([rev, np.zeros_like(rev[..., :1, :])], axis=-2)[..., 1:k + 1, :]
    slope = np.diff(W[..., :k], axis=-1) / np.diff(t[:k])
    cell = np.einsum("...ki,ki->...k", R[..., 1:, :], np.diff(plan.F, axis=0)) + slope * plan.G
    start = R[..., 0, :] @ plan.F[0] + plan.first * W[..., 0] / t[0]
    drift = np.empty(W.shape[:-1] + (k,))
    drift[..., 0] = start
    drift[..., 1:] = start[..., None] + np.cumsum(cell, axis=-1)
    return W[..., :k] - drift


def x_zero(kernel, W: SamplePath, T=None, tol=TRUNCATION_TOL):
    """Anticipative particular solution ``X0 = W - int_0^. (int_u^inf phi dW) . f(u) du``.

    The outer integral is truncated at the end of ``W``'s grid; the share
    of variance lost is bounded from the closed-form tail of ``phi phi^T``.

    Raises
    ------
    TruncationError
        If the grid ends before ``10 T`` or the lost share exceeds ``tol``.
    """
    plan = XZeroPlan.build(kernel, W.grid, T, tol)
    return SamplePath(W.grid.truncate(plan.T), x_zero_values(plan, W.values), "sde-solution")


# -- recovery of Y ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Recovery:
    """``alpha_t I_t(X)`` at ``T/4``, ``T/2`` and ``T`` (rows of ``history``)."""

    y: np.ndarray
    times: np.ndarray
    history: np.ndarray

    @property
    def drift(self):
        """Change between the ``T/2`` and ``T`` estimates."""
        return self.history[..., 2, :] - self.history[..., 1, :]


def recover_values(basis, grid, values, T, scheme="average"):
    """``alpha_t I_t`` at the grid points nearest ``T/4, T/2, T``; shape ``(..., 3, n)``."""
    idx = [grid.nearest(T / 4), grid.nearest(T / 2), grid.index(T)]
    I = ito_values(cell_weights(basis, grid, scheme), values)[..., idx, :]
    a = _basis.alpha(basis, grid.times[idx])
    return np.einsum("kij,...kj->...ki", a, I), grid.times[idx]


def recover_y(basis, path, T, scheme="average"):
    """``Y = lim alpha_t I_t(X)`` evaluated at ``T``, with the ``T/4, T/2`` values."""
    hist, times = recover_values(basis, path.grid, path.values, T, scheme)
    return Recovery(hist[..., 2, :], times, hist)
