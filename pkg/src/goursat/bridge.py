"""Generalized bridges and the solution family of the singular linear SDE.

A bridge pins the Wiener integrals ``int_0^t1 f dB`` to a prescribed vector
``y`` by subtracting a deterministic combination of the primitives ``F``.
The SDE ``X = W + int phi . I(X) du`` has the solutions ``X0 + F Y``, where
``X0`` is the anticipative particular solution and ``Y`` is any random
vector; ``Y`` is recovered from ``X`` as ``lim alpha_t I_t(X)``.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import basis as _basis
from .basis import AlphaInfinity, FunctionBasis
from .errors import ConfigError
from .kernel import GoursatKernel
from .paths import Y_STREAM, SamplePath, cell_weights, ito_values
from .transform import XZeroPlan, x_zero_values


@dataclass(frozen=True, eq=False)
class BridgeSpec:
    basis: FunctionBasis
    t1: float
    y: np.ndarray

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        if not self.t1 > 0:
            raise ConfigError("bridge horizon must be positive")
        if y.shape != (self.basis.n,) or not np.all(np.isfinite(y)):
            raise ConfigError(f"endpoint must be a finite vector of length {self.basis.n}")
        object.__setattr__(self, "y", y)


def psi(basis, u, t1):
    """Bridge weights ``psi(u) = alpha_t1 F(u)``, shape ``u.shape + (n,)``.

    Examples
    --------
    >>> from goursat.basis import FunctionBasis
    >>> psi(FunctionBasis.powers([0, 1]), 1.0, 1.0).round(12) + 0.0
    array([1., 0.])
    """
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0) or np.any(u > t1 * (1 + 1e-12)):
        raise ValueError("psi needs 0 < u <= t1")
    return basis.primitive(u) @ _basis.alpha(basis, float(t1)).T


def bridge_values(spec, grid, values):
    """Bridge values on the grid points ``<= t1``; paths on leading axes."""
    k = grid.index(spec.t1) + 1
    x = np.asarray(values, dtype=float)[..., :k]
    w = cell_weights(spec.basis, grid)[:k]
    I1 = ito_values(w, x)[..., -1, :]
    p = psi(spec.basis, grid.times[:k], spec.t1)
    return x - (I1 - spec.y) @ p.T


def generalized_bridge(spec: BridgeSpec, B: SamplePath):
    """``B^y = B - psi . (int_0^t1 f dB - y)`` on the grid points up to ``t1``.

    The value at ``t1`` is the continuous limit of the same formula.
    """
    grid = B.grid.truncate(spec.t1)
    return SamplePath(grid, bridge_values(spec, B.grid, B.values), "bridge")


# -- the solution family ------------------------------------------------------

def gaussian_factor(a_inf: AlphaInfinity, rtol=1e-12):
    """Reduced-rank ``L`` with ``L L^T = alpha_inf`` and exact zeros on divergent rows."""
    a = np.array(a_inf.matrix, dtype=float)
    n = a.shape[0]
    keep = ~np.asarray(a_inf.zero_rows, dtype=bool)
    L = np.zeros((n, 0))
    if keep.any():
        sub = a[np.ix_(keep, keep)]
        lam, V = np.linalg.eigh(0.5 * (sub + sub.T))
        top = lam > rtol * max(lam.max(), 0.0)
        L = np.zeros((n, int(top.sum())))
        L[keep] = V[:, top] * np.sqrt(lam[top])
    return L


@dataclass(frozen=True, eq=False)
class SolutionSpec:
    """Member of the solution family: ``kernel`` plus the law of ``Y``.

    ``source`` is ``"fixed"`` (use ``y``), ``"gaussian"`` (``N(0, alpha_inf)``
    independent of the driver) or ``"custom"`` (``sampler(generator) -> y``).
    """

    kernel: GoursatKernel
    source: str = "fixed"
    y: Optional[np.ndarray] = None
    a_inf: Optional[AlphaInfinity] = None
    sampler: Optional[Callable] = None

    def __post_init__(self):
        n = self.kernel.basis.n
        if self.source == "fixed":
            y = np.zeros(n) if self.y is None else np.atleast_1d(np.asarray(self.y, dtype=float))
            if y.shape != (n,):
                raise ConfigError(f"Y must have length {n}")
            object.__setattr__(self, "y", y)
        elif self.source == "gaussian":
            if self.a_inf is None:
                raise ConfigError("a Gaussian Y needs alpha_inf; compute it with alpha_infinity")
            object.__setattr__(self, "_factor", gaussian_factor(self.a_inf))
        elif self.source == "custom":
            if self.sampler is None:
                raise ConfigError("a custom Y needs a sampler")
        else:
            raise ConfigError(f"unknown Y source {self.source!r}")

    def draw(self, rng, indices):
        """``Y`` for each path index, shape ``(len(indices), n)``; stream ``Y_STREAM``."""
        n = self.kernel.basis.n
        if self.source == "fixed":
            return np.tile(self.y, (len(indices), 1))
        out = np.empty((len(indices), n))
        for row, idx in enumerate(indices):
            gen = rng.generator(idx, Y_STREAM)
            if self.source == "gaussian":
                L = self._factor
                out[row] = L @ gen.standard_normal(L.shape[1])
            else:
                out[row] = np.asarray(self.sampler(gen), dtype=float)
        return out


def solution_values(plan: XZeroPlan, W, Y):
    """``X0 + F Y`` on the points ``<= T``; ``Y`` has shape ``(..., n)``."""
    x0 = x_zero_values(plan, W)
    return x0 + np.asarray(Y, dtype=float) @ plan.F.T


def sde_solution(spec: SolutionSpec, W: SamplePath, T, rng=None, index=0, plan=None):
    """One solution path on ``(0, T]`` driven by ``W``.

    ``W`` must extend to the anticipation horizon (see
    :func:`goursat.transform.x_zero_grid`).  Random ``Y`` is drawn from the
    stream of path ``index``.
    """
    if spec.source != "fixed" and rng is None:
        raise ConfigError("a random Y needs an RngSpec")
    if plan is None:
        plan = XZeroPlan.build(spec.kernel, W.grid, T)
    Y = spec.draw(rng, [index])[0]
    return SamplePath(W.grid.truncate(plan.T), solution_values(plan, W.values, Y), "sde-solution")
