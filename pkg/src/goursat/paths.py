"""Time grids, seeded Brownian paths and discrete Wiener integrals.

Grids cluster geometrically towards 0, where the drift of a Goursat-Volterra
transform is singular, and may carry a coarse geometric tail for integrals
that must reach far beyond the observation horizon.  Time 0 is implicit:
every path has value 0 there.

Random numbers are drawn from one counter-based stream per ``(seed, stream,
path index)``, so a path never depends on how an ensemble is batched or how
many threads produce it.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

ROLES = ("brownian", "transformed", "bridge", "sde-solution", "tilted", "deterministic")

BROWNIAN_STREAM = 0
Y_STREAM = 1


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing positive times ``t_1 = eps0 < ... < t_M``.

    Use :meth:`build` for the standard construction; ``horizon`` is the end
    of the fine (uniform) body, and anything after it is the coarse tail.
    """

    times: np.ndarray
    horizon: float
    eps0: float
    ratio: float = float("nan")
    dt: float = float("nan")
    n_geometric: int = 1

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        if t.ndim != 1 or t.size < 2 or t[0] <= 0 or np.any(np.diff(t) <= 0):
            raise ValueError("grid times must be positive and strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    @classmethod
    def build(cls, T, dt=None, eps0=None, ratio=1.2, tail_end=None, tail_ratio=1.1):
        """Geometric clustering at 0, uniform body, optional geometric tail.

        Starting from ``eps0`` (default ``1e-4 T``) times grow by ``ratio``
        until the next step would exceed ``dt`` (default ``T / 2000``, shrunk
        so that it divides ``T``); the body consists of the multiples of
        ``dt`` up to ``T``, so round times are grid points.  With
        ``tail_end > T`` steps grow by ``tail_ratio`` up to ``tail_end``.
        """
        T = float(T)
        dt = T / 2000.0 if dt is None else float(dt)
        eps0 = 1e-4 * T if eps0 is None else float(eps0)
        if not (T > 0 and dt > 0 and 0 < eps0 < T and ratio > 1):
            raise ValueError("need T > 0, dt > 0, 0 < eps0 < T and ratio > 1")
        steps = int(np.ceil(T / dt - 1e-9))
        dt = T / steps
        pts = [eps0]
        while pts[-1] * (ratio - 1.0) < dt and pts[-1] * ratio < T:
            pts.append(pts[-1] * ratio)
        ng = len(pts)
        # the body sits on multiples of dt, at least half a geometric step on
        first = int(np.ceil(pts[-1] * (1.0 + 0.5 * (ratio - 1.0)) / dt - 1e-9))
        body = dt * np.arange(max(first, 1), steps + 1, dtype=float)
        body[-1:] = T
        body = body[body > pts[-1]]
        times = np.concatenate([pts, body])
        if tail_end is not None and tail_end > T:
            tail = []
            t = T
            while t < tail_end:
                t = min(t * tail_ratio, tail_end) if t * tail_ratio < tail_end * (1 - 1e-12) else tail_end
                tail.append(t)
            times = np.concatenate([times, tail])
        return cls(times, T, eps0, ratio, dt, ng)

    @classmethod
    def from_times(cls, times, horizon=None):
        times = np.asarray(times, dtype=float)
        return cls(times, float(times[-1] if horizon is None else horizon), float(times[0]))

    def __len__(self):
        return self.times.size

    @property
    def edges(self):
        """Cell boundaries including the implicit origin: ``(0, t_1, ..., t_M)``."""
        return np.concatenate([[0.0], self.times])

    @property
    def end(self):
        return float(self.times[-1])

    def index(self, t, rtol=1e-9):
        """Index of grid time ``t`` (which must be a grid point)."""
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > rtol * max(1.0, abs(t)):
            raise ValueError(f"{t} is not a grid point")
        return i

    def nearest(self, t):
        return int(np.argmin(np.abs(self.times - t)))

    def refine(self):
        """Nested refinement halving every step and the first point.

        Geometric cells (near 0 and in the tail) are split at their geometric
        mean, so the ratio becomes ``sqrt(ratio)``; uniform cells are split at
        their midpoint.  The first cell ``(0, eps0]`` receives a geometric run
        down to at most ``eps0 / 2``.  All old points are kept.
        """
        t = self.times
        q = np.sqrt(self.ratio) if self.ratio > 1 else np.sqrt(1.2)
        K = int(np.ceil(np.log(2.0) / np.log(q) - 1e-12))
        head = t[0] * q ** -np.arange(K, 0, -1, dtype=float)
        a, b = t[:-1], t[1:]
        body = (a >= self.horizon * (1 - 1e-12)) | (np.arange(a.size) < self.n_geometric - 1)
        mids = np.where(body, np.sqrt(a * b), 0.5 * (a + b))
        inner = np.empty(2 * t.size - 1)
        inner[0::2] = t
        inner[1::2] = mids
        times = np.concatenate([head, inner])
        ng = K + 2 * self.n_geometric - 1
        return TimeGrid(times, self.horizon, float(times[0]), float(q), self.dt / 2.0, ng)

    def truncate(self, t):
        """Grid of the points ``<= t``."""
        i = self.index(t)
        return TimeGrid(self.times[: i + 1], min(self.horizon, float(t)), self.eps0, self.ratio,
                        self.dt, min(self.n_geometric, i + 1))

    def describe(self):
        return {
            "points": int(self.times.size),
            "eps0": self.eps0,
            "ratio": self.ratio,
            "dt": self.dt,
            "horizon": self.horizon,
            "end": self.end,
        }


@dataclass(frozen=True, eq=False)
class SamplePath:
    """Values ``x_1..x_M`` on ``grid.times``; ``x_0 = 0`` at time 0 is implicit."""

    grid: TimeGrid
    values: np.ndarray
    role: str = "brownian"

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape[-1] != len(self.grid):
            raise ValueError("path values do not match the grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("path values must be finite")
        if self.role not in ROLES:
            raise ValueError(f"unknown path role {self.role!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def times(self):
        return self.grid.times

    def at(self, t):
        return float(self.values[..., self.grid.index(t)])

    def to_csv_rows(self):
        return np.column_stack([self.grid.times, self.values])


@dataclass(frozen=True)
class RngSpec:
    """Master seed; each ``(stream, path index)`` gets an independent Philox stream."""

    seed: int

    def generator(self, index, stream=BROWNIAN_STREAM):
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(stream), int(index)))
        return np.random.Generator(np.random.Philox(ss))


def brownian_values(grid, rng, indices):
    """Brownian values on ``grid`` for each path index, shape ``(len(indices), M)``."""
    sd = np.sqrt(np.diff(grid.edges))
    out = np.empty((len(indices), len(grid)))
    for row, idx in enumerate(indices):
        z = rng.generator(idx, BROWNIAN_STREAM).standard_normal(len(grid))
        np.cumsum(sd * z, out=out[row])
    return out


def sample_brownian(grid, rng, path_index):
    """One Brownian path; identical for identical ``(seed, path_index)``."""
    return SamplePath(grid, brownian_values(grid, rng, [path_index])[0], "brownian")


def refine_values(fine, coarse, values, rng, index=0, stream=2):
    """Extend coarse path values to the nested grid ``fine`` by Brownian bridges.

    New points are drawn left to right, each conditioned on the previous
    fine value and the next coarse value; the noise stream is keyed by
    ``(seed, stream, index)``.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    pos = np.searchsorted(fine.times, coarse.times)
    if not np.allclose(fine.times[pos], coarse.times, rtol=1e-12, atol=0):
        raise ValueError("fine grid does not contain the coarse grid")
    known = np.zeros(len(fine), dtype=bool)
    known[pos] = True
    out = np.zeros((values.shape[0], len(fine)))
    out[:, pos] = values
    nxt = np.searchsorted(pos, np.arange(len(fine)))
    z = np.stack([rng.generator(index + r, stream).standard_normal(len(fine))
                  for r in range(values.shape[0])])
    tl, xl = 0.0, np.zeros(values.shape[0])
    for i, t in enumerate(fine.times):
        if not known[i]:
            tr = coarse.times[nxt[i]]
            xr = values[:, nxt[i]]
            w = (t - tl) / (tr - tl)
            out[:, i] = xl + w * (xr - xl) + np.sqrt((t - tl) * (tr - t) / (tr - tl)) * z[:, i]
        tl, xl = t, out[:, i]
    return out


def map_batches(fn, n_paths, batch=1000, threads=1, start=0):
    """Apply ``fn(indices)`` over path-index batches and stack results in index order.

    ``fn`` returns an array (or tuple of arrays) whose leading axis indexes
    paths.  Results are independent of ``threads``.
    """
    chunks = [np.arange(i, min(i + batch, start + n_paths)) for i in range(start, start + n_paths, batch)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(fn, chunks))
    else:
        parts = [fn(c) for c in chunks]
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate([p[k] for p in parts]) for k in range(len(parts[0])))
    return np.concatenate(parts)


# -- discrete Wiener integrals -------------------------------------------------

def cell_weights(basis, grid, scheme="average"):
    """Integrand weights of each cell ``[t_{i-1}, t_i]`` (``t_0 = 0``), shape ``(M, n)``.

    ``"average"``: exact cell averages ``(F(t_i) - F(t_{i-1})) / (t_i - t_{i-1})``
    from the basis primitive.  ``"left"``: left-point values ``f(t_{i-1})``,
    with ``f(eps0 / 2)`` standing in for the singular point 0.
    """
    e = grid.edges
    if scheme == "average":
        F = basis.primitive(e)
        return np.diff(F, axis=0) / np.diff(e)[:, None]
    if scheme == "left":
        left = e[:-1].copy()
        left[0] = 0.5 * e[1]
        return basis(left)
    raise ValueError(f"unknown integration scheme {scheme!r}")


def increments(values):
    """Increments over every cell, the first one from the implicit origin."""
    values = np.asarray(values, dtype=float)
    return np.diff(values, axis=-1, prepend=0.0)


def ito_values(weights, values):
    """Running sums ``I_{t_k} = sum_{i <= k} w_i dx_i``, shape ``values.shape + (n,)``."""
    dx = increments(values)
    return np.cumsum(dx[..., None] * weights, axis=-2)


def ito_integral(basis, path, scheme="average"):
    """Running vector ``I_t = int_0^t f dX`` on the path's grid, shape ``(M, n)``.

    Deterministic integrands need no anticipation control; cell averages are
    the conditional expectation of the exact Wiener integral given the grid
    values, whereas left points (``scheme="left"``) lose a first-order term.
    """
    return ito_values(cell_weights(basis, path.grid, scheme), path.values)
