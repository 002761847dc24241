"""Monte Carlo estimators and the statistical surrogates for claims in law.

Claims about Brownian motion and independence are exact in law; finite
ensembles test them through 4-SE bands.  Covariances carry jackknife
standard errors; correlations use the large-sample ``(1 - r^2) / sqrt(N)``.
A family of band checks passes when its violations do not exceed the
expected number of false positives plus one.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from . import basis as _basis
from .errors import ConfigError

BAND = 4.0


@dataclass(frozen=True)
class McEstimate:
    mean: float
    se: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError("an estimate needs at least two samples")

    def within(self, target, band=BAND):
        return abs(self.mean - target) <= band * self.se

    def z(self, target):
        d = self.mean - target
        if self.se > 0:
            return d / self.se
        return 0.0 if d == 0 else float(np.copysign(np.inf, d))

    def __str__(self):
        return f"{self.mean:.6g} +- {self.se:.3g} (N={self.n})"


def mean_estimate(samples):
    """Sample mean with SE = sample standard deviation / sqrt(N)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ConfigError("an estimate needs at least two samples")
    return McEstimate(float(np.mean(x)), float(np.std(x, ddof=1) / np.sqrt(x.size)), x.size)


def jackknife_cov(x, y):
    """Unbiased covariance of paired samples with its leave-one-out jackknife SE.

    All ``N`` leave-one-out covariances follow from the full sums in
    ``O(N)``; the data are centred first so the updates do not cancel.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 3 or y.size != n:
        raise ConfigError("covariance needs at least three paired samples")
    x = x - x.mean()
    y = y - y.mean()
    sxy = np.dot(x, y)
    cov = sxy / (n - 1)
    # sums without sample i: Sx = -x_i, Sy = -y_i, Sxy = sxy - x_i y_i
    loo = (sxy - x * y - x * y / (n - 1)) / (n - 2)
    se = np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
    return McEstimate(float(cov), float(se), n)


def covariance_estimate(ensemble, s, t, grid=None, min_paths=100):
    """``cov(X_s, X_t)`` over an ensemble with a jackknife SE.

    ``ensemble`` is an ``(N, M)`` array on ``grid`` or a list of
    :class:`SamplePath` sharing one grid.
    """
    if not isinstance(ensemble, np.ndarray):
        grid = ensemble[0].grid
        ensemble = np.stack([p.values for p in ensemble])
    if ensemble.shape[0] < min_paths:
        raise ConfigError(f"need at least {min_paths} paths, got {ensemble.shape[0]}")
    return jackknife_cov(ensemble[:, grid.index(s)], ensemble[:, grid.index(t)])


def allowed_violations(count, band=BAND):
    """Expected false positives of ``count`` two-sided band checks, plus one."""
    return int(np.floor(count * 2.0 * norm.sf(band))) + 1


@dataclass(frozen=True, eq=False)
class IndependenceReport:
    """Correlations of the rows of ``I_t`` against columns of the sampled process."""

    corr: np.ndarray
    se: np.ndarray
    band: float = BAND
    labels: tuple = field(default=())

    @property
    def z(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.abs(self.corr) / self.se
        return np.where(self.se > 0, z, np.where(self.corr == 0, 0.0, np.inf))

    @property
    def violations(self):
        return int(np.sum(self.z > self.band))

    @property
    def allowed(self):
        return allowed_violations(self.corr.size, self.band)

    @property
    def passed(self):
        return self.violations <= self.allowed

    @property
    def max_z(self):
        return float(np.max(self.z))


def correlation_matrix(a, b):
    """Pearson correlations between columns of ``a`` (N, p) and ``b`` (N, q), with SEs."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = (a - a.mean(0)) / a.std(0)
    b = (b - b.mean(0)) / b.std(0)
    n = a.shape[0]
    r = np.clip(a.T @ b / n, -1.0, 1.0)
    return r, (1.0 - r ** 2) / np.sqrt(n - 1)


def independence_test(I_t, process, band=BAND):
    """Correlations between each component of ``I_t`` (N, n) and ``process`` samples (N, q)."""
    r, se = correlation_matrix(I_t, process)
    return IndependenceReport(r, se, band)


def progressive_decomposition_test(basis, t, I_t, Y, tail_integral, process, T=None, band=BAND):
    """Surrogate for the progressive decomposition at time ``t``.

    Parameters
    ----------
    I_t : (N, n) Wiener integrals ``int_0^t f dB``.
    Y : (N, n) recovered terminal vectors.
    tail_integral : (N, n) ``int_t^T phi dSigma(B)``.
    process : (N, q) samples of ``Sigma(B)`` in ``(0, t]``.
    T : truncation time of ``tail_integral``; sets the tolerance.

    Returns the correlation report of ``Y - tail_integral`` against
    ``process`` together with the RMS of ``I_t - m_t (Y - tail_integral)``
    and the RMS expected from the truncation at ``T``.
    """
    m = _basis.gramian(basis, float(t))
    z = np.asarray(Y) - np.asarray(tail_integral)
    resid = np.asarray(I_t) - z @ m.T
    rms = np.sqrt(np.mean(resid ** 2, axis=0))
    expected = np.zeros(basis.n)
    if T is not None:
        tail = _basis.phi_tail(basis, T)
        expected = np.sqrt(np.clip(np.diag(m @ tail @ m), 0.0, None))
    return independence_test(z, process, band), rms, expected


@dataclass(frozen=True, eq=False)
class BrownianityReport:
    """Covariance band checks on a grid of time pairs plus increment variances."""

    times: np.ndarray
    cov: list
    increments: list

    @property
    def checks(self):
        out = [(f"cov({s:g},{t:g})", e, min(s, t)) for (s, t, e) in self.cov]
        out += [(f"var(d[{a:g},{b:g}])", e, b - a) for (a, b, e) in self.increments]
        return out

    @property
    def violations(self):
        return sum(not e.within(target) for _, e, target in self.checks)

    @property
    def allowed(self):
        return allowed_violations(len(self.checks))

    @property
    def passed(self):
        return self.violations <= self.allowed

    @property
    def max_z(self):
        return max(abs(e.z(target)) for _, e, target in self.checks)


def brownianity_suite(samples, times):
    """``samples`` is (N, len(times)) of a process at ``times``.

    Every pair ``s <= t`` is compared with ``s ^ t`` and every consecutive
    increment variance with the time step.
    """
    samples = np.asarray(samples, dtype=float)
    times = np.asarray(times, dtype=float)
    cov = []
    for i, s in enumerate(times):
        for j in range(i, times.size):
            cov.append((s, times[j], jackknife_cov(samples[:, i], samples[:, j])))
    inc = []
    prev = np.zeros(samples.shape[0])
    lo = 0.0
    for j, t in enumerate(times):
        d = samples[:, j] - prev
        inc.append((lo, t, jackknife_cov(d, d)))
        prev, lo = samples[:, j], t
    return BrownianityReport(times, cov, inc)
