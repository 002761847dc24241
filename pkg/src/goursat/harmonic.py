"""Space-time harmonic functions and the tilted Wiener measure.

For a law ``nu`` of the terminal vector ``Y``,

    h(t, x) = int exp(y . x - y . m_t y / 2) nu(dy)

makes ``h(t, I_t(B))`` a unit-mean martingale when ``alpha_inf = 0``.  The
tilted measure is the law of ``B + F(.) Y`` with ``Y ~ nu`` independent of
``B``.  Everything is evaluated in log space.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from . import basis as _basis
from .errors import ConfigError
from .paths import Y_STREAM, SamplePath, brownian_values, cell_weights, ito_values, map_batches


@dataclass(frozen=True, eq=False)
class EndpointLaw:
    """Law ``nu`` of ``Y``: discrete (``points``, ``weights``) or Gaussian (``mean``, ``cov``)."""

    kind: str
    points: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    mean: Optional[np.ndarray] = None
    cov: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind == "discrete":
            pts = np.atleast_2d(np.asarray(self.points, dtype=float))
            w = np.ones(len(pts)) / len(pts) if self.weights is None else np.asarray(self.weights, dtype=float)
            if w.shape != (len(pts),) or np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ConfigError("discrete weights must be positive and sum to 1")
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "weights", w)
        elif self.kind == "gaussian":
            C = np.atleast_2d(np.asarray(self.cov, dtype=float))
            mu = np.zeros(len(C)) if self.mean is None else np.atleast_1d(np.asarray(self.mean, dtype=float))
            if C.shape != (len(mu), len(mu)) or not np.allclose(C, C.T):
                raise ConfigError("covariance must be a symmetric matrix matching the mean")
            lam, V = np.linalg.eigh(C)
            if lam.min() < -1e-12 * max(1.0, lam.max()):
                raise ConfigError("covariance must be positive semidefinite")
            keep = lam > 1e-12 * max(1.0, lam.max())
            object.__setattr__(self, "cov", C)
            object.__setattr__(self, "mean", mu)
            object.__setattr__(self, "_factor", V[:, keep] * np.sqrt(lam[keep]))
        else:
            raise ConfigError(f"unknown law kind {self.kind!r}")

    @classmethod
    def point(cls, y):
        return cls("discrete", points=[np.atleast_1d(y)], weights=[1.0])

    @classmethod
    def gaussian(cls, cov, mean=None):
        return cls("gaussian", mean=mean, cov=cov)

    @property
    def dim(self):
        return self.points.shape[1] if self.kind == "discrete" else len(self.mean)

    @property
    def factor(self):
        """Reduced-rank ``L`` with ``L L^T = cov`` (Gaussian laws)."""
        return self._factor

    def sample(self, gen, size=None):
        if self.kind == "discrete":
            k = gen.choice(len(self.weights), size=size, p=self.weights)
            return self.points[k]
        L = self._factor
        z = gen.standard_normal((L.shape[1],) if size is None else (size, L.shape[1]))
        return self.mean + z @ L.T


def log_h(basis, law: EndpointLaw, t, x):
    """``log h(t, x)``; ``x`` has shape ``(..., n)``.

    The Gaussian case integrates over ``y = mean + L z`` with the reduced
    factor ``L``, which needs no inverse of the covariance:

        log h = mu.x - mu.m mu / 2 - log det(I + L^T m L) / 2
                + v^T (I + L^T m L)^{-1} v / 2,   v = L^T (x - m mu).
    """
    if law.dim != basis.n:
        raise ConfigError("law dimension does not match the basis")
    if not t > 0:
        raise ValueError("t must be positive")
    m = _basis.gramian(basis, float(t))
    x = np.asarray(x, dtype=float)
    if law.kind == "discrete":
        y = law.points
        quad = 0.5 * np.einsum("ki,ij,kj->k", y, m, y)
        return logsumexp(x @ y.T - quad + np.log(law.weights), axis=-1)
    mu, L = law.mean, law.factor
    base = x @ mu - 0.5 * mu @ m @ mu
    if L.shape[1] == 0:
        return base
    A = np.eye(L.shape[1]) + L.T @ m @ L
    cf = np.linalg.cholesky(A)
    v = (x - m @ mu) @ L
    w = np.linalg.solve(cf, v.T if v.ndim > 1 else v)
    quad = 0.5 * np.sum(w * w, axis=0)
    return base - np.sum(np.log(np.diag(cf))) + quad


def harmonic_h(basis, law, t, x):
    """Space-time harmonic function ``h(t, x) > 0``.

    Examples
    --------
    >>> from goursat.basis import FunctionBasis
    >>> b = FunctionBasis.powers([0])
    >>> round(float(harmonic_h(b, EndpointLaw.point(0.5), 1.0, [0.2])), 12)
    0.975309912028
    """
    return np.exp(log_h(basis, law, t, x))


def _require_zero_alpha(basis):
    if not _basis.alpha_infinity(basis).is_zero:
        raise ConfigError("the martingale property needs alpha_inf = 0 for the basis")


def martingale_samples(basis, law, grid, times, rng, n_paths, batch=1000, threads=1):
    """``h(t, I_t(B))`` for each path and each ``t`` in ``times`` (grid points)."""
    idx = [grid.index(t) for t in times]
    w = cell_weights(basis, grid)

    def fn(paths):
        B = brownian_values(grid, rng, paths)
        I = ito_values(w, B)[:, idx, :]
        return np.stack([harmonic_h(basis, law, t, I[:, j]) for j, t in enumerate(times)], axis=1)

    return map_batches(fn, n_paths, batch, threads)


def martingale_check(basis, law, t, n_paths, rng, grid=None, batch=1000, threads=1):
    """Monte Carlo ``E[h(t, I_t(B))]``; the expectation is 1."""
    from .paths import TimeGrid
    from .stats import mean_estimate

    _require_zero_alpha(basis)
    grid = TimeGrid.build(t) if grid is None else grid
    vals = martingale_samples(basis, law, grid, [t], rng, n_paths, batch, threads)[:, 0]
    return mean_estimate(vals)


def tilted_values(basis, law, grid, rng, indices):
    """``B + F(.) Y`` for each path index; ``Y`` comes from stream ``Y_STREAM``."""
    B = brownian_values(grid, rng, indices)
    Y = np.stack([np.atleast_1d(law.sample(rng.generator(i, Y_STREAM))) for i in indices])
    return B + Y @ basis.primitive(grid.times).T, Y


def tilted_sampler(basis, law, grid, rng, index=0):
    """One path of the tilted measure, ``B + Y . int_0^. f`` with ``Y ~ law``."""
    vals, _ = tilted_values(basis, law, grid, rng, [index])
    return SamplePath(grid, vals[0], "tilted")
