"""Reproducing bases, Gramian matrices and their inverses.

A basis is a finite vector ``f = (f_1, ..., f_n)`` of locally square
integrable functions on ``(0, inf)``.  Its Gramian ``m_t = int_0^t f f^T``
is computed in closed form for constant / power / exponential members and
by adaptive quadrature otherwise.  ``alpha_t = m_t^{-1}`` is obtained from a
Cholesky factorisation of the diagonally equilibrated Gramian, which makes
power bases scale invariant in ``t``.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy import interpolate, special

from .errors import ConfigError, ConvergenceError, IllConditionedError
from .quadrature import quadrature, quadrature_vec

KINDS = ("const", "power", "exp", "table", "callable")
COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class BasisFunction:
    """One member ``f_i`` of a reproducing basis.

    Use the constructors :meth:`constant`, :meth:`power`, :meth:`exponential`,
    :meth:`table` and :meth:`from_callable` rather than the raw fields.
    """

    kind: str
    param: float = 0.0
    knots: tuple = ()
    values: tuple = ()
    fn: Optional[Callable] = None
    norm2: float = np.inf
    near_zero_power: float = 0.0
    _interp: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown basis kind {self.kind!r}")
        if self.kind == "power" and not self.param > -0.5:
            raise ConfigError(f"power exponent must exceed -1/2, got {self.param}")
        if self.kind == "exp" and not self.param > 0.0:
            raise ConfigError(f"exponential rate must be positive, got {self.param}")
        if self.kind == "table":
            t = np.asarray(self.knots, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if t.ndim != 1 or t.size < 2 or t.size != v.size:
                raise ConfigError("a table needs at least two (time, value) rows")
            if t[0] <= 0.0 or np.any(np.diff(t) <= 0.0):
                raise ConfigError("table times must be positive and strictly increasing")
            if not np.all(np.isfinite(v)):
                raise ConfigError("table values must be finite")
            object.__setattr__(self, "_interp", interpolate.PchipInterpolator(t, v, extrapolate=False))
        if self.kind == "callable" and self.near_zero_power <= -0.5:
            raise ConfigError("a callable must be square integrable near 0")

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls):
        return cls("const")

    @classmethod
    def power(cls, lam):
        return cls("power", float(lam))

    @classmethod
    def exponential(cls, rate):
        return cls("exp", float(rate))

    @classmethod
    def table(cls, times, values):
        """Monotone cubic (PCHIP) interpolant of a two-column table.

        The first value is held on ``(0, times[0])`` and the function is zero
        after the last knot, so its L2 norm over ``(0, inf)`` is finite.
        """
        return cls("table", knots=tuple(map(float, times)), values=tuple(map(float, values)))

    @classmethod
    def from_callable(cls, fn, *, squared_norm=np.inf, near_zero_power=0.0):
        """Wrap an arbitrary vectorised function.

        ``squared_norm`` is ``int_0^inf fn**2`` (``inf`` when divergent) and
        ``near_zero_power`` the exponent ``p`` with ``fn(s) ~ s**p`` at 0.
        """
        return cls("callable", fn=fn, norm2=float(squared_norm),
                   near_zero_power=float(near_zero_power))

    # -- evaluation -------------------------------------------------------

    @property
    def exponent(self):
        """Power-law exponent of the function near 0."""
        if self.kind == "power":
            return self.param
        if self.kind == "callable":
            return self.near_zero_power
        return 0.0

    @property
    def is_power(self):
        return self.kind in ("const", "power")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "const":
            return np.ones_like(t)
        if self.kind == "power":
            return t**self.param
        if self.kind == "exp":
            return np.exp(-self.param * t)
        if self.kind == "table":
            k0, k1 = self.knots[0], self.knots[-1]
            out = np.where(t < k0, self.values[0], 0.0)
            inside = (t >= k0) & (t <= k1)
            if np.any(inside):
                out = np.where(inside, np.nan_to_num(self._interp(np.clip(t, k0, k1))), out)
            return out
        return np.asarray(self.fn(t), dtype=float) * np.ones_like(t)

    def primitive(self, t):
        """``int_0^t f(s) ds``."""
        t = np.asarray(t, dtype=float)
        if self.kind == "const":
            return t.copy()
        if self.kind == "power":
            return t ** (self.param + 1.0) / (self.param + 1.0)
        if self.kind == "exp":
            return -np.expm1(-self.param * t) / self.param
        if self.kind == "table":
            k0, k1 = self.knots[0], self.knots[-1]
            anti = self._interp.antiderivative()
            head = self.values[0] * k0
            body = head + anti(np.clip(t, k0, k1))
            return np.where(t < k0, self.values[0] * t, body)
        flat = np.atleast_1d(t).ravel()
        p = self.near_zero_power
        vals = np.array([quadrature(self.fn, 0.0, x, singular_power=p) if x > 0 else 0.0
                         for x in flat])
        return vals.reshape(t.shape)

    @property
    def squared_norm(self):
        """``int_0^inf f**2``; ``inf`` for divergent members."""
        if self.kind in ("const", "power"):
            return np.inf
        if self.kind == "exp":
            return 1.0 / (2.0 * self.param)
        if self.kind == "table":
            return _pair_integral(self, self, self.knots[-1])
        return self.norm2

    @property
    def norm_finite(self):
        return bool(np.isfinite(self.squared_norm))

    def describe(self):
        if self.kind == "const":
            return "const"
        if self.kind == "power":
            return f"power lambda={self.param!r}"
        if self.kind == "exp":
            return f"exp rate={self.param!r}"
        if self.kind == "table":
            return f"table knots={len(self.knots)}"
        return f"callable {getattr(self.fn, '__name__', 'fn')}"


@dataclass(frozen=True, eq=False)
class FunctionBasis:
    """Ordered vector of basis functions, ``n >= 1``."""

    functions: tuple

    def __post_init__(self):
        fs = tuple(self.functions)
        if len(fs) == 0:
            raise ConfigError("a basis needs at least one function")
        object.__setattr__(self, "functions", fs)

    @classmethod
    def powers(cls, lambdas):
        return cls(tuple(BasisFunction.power(l) for l in lambdas))

    @property
    def n(self):
        return len(self.functions)

    def __len__(self):
        return self.n

    def __call__(self, t):
        """Evaluate, returning shape ``t.shape + (n,)``."""
        t = np.asarray(t, dtype=float)
        return np.stack([f(t) for f in self.functions], axis=-1)

    def primitive(self, t):
        """``F(t) = int_0^t f``, shape ``t.shape + (n,)``."""
        t = np.asarray(t, dtype=float)
        return np.stack([f.primitive(t) for f in self.functions], axis=-1)

    @property
    def is_power(self):
        return all(f.is_power for f in self.functions)

    @property
    def lambdas(self):
        return np.array([f.exponent for f in self.functions])

    @property
    def divergent(self):
        """Boolean mask of members with infinite L2 norm."""
        return np.array([not f.norm_finite for f in self.functions])

    def describe(self):
        return "; ".join(f.describe() for f in self.functions)


# -- parsing --------------------------------------------------------------

def _kv(tokens, line):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ConfigError(f"expected key=value in basis line {line!r}")
        k, v = tok.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def read_table(path):
    data = np.loadtxt(path, delimiter=None, ndmin=2, comments="#")
    if data.shape[1] != 2:
        raise ConfigError(f"{path}: expected two columns (time, value)")
    return data[:, 0], data[:, 1]


def parse_basis_function(line, base_dir=None):
    """Parse ``power lambda=<x>`` | ``exp rate=<x>`` | ``const`` | ``table file=<path>``."""
    tokens = line.replace(",", " ").split()
    if not tokens:
        raise ConfigError("empty basis line")
    head, rest = tokens[0].lower(), tokens[1:]
    try:
        if head in ("const", "constant"):
            if rest:
                raise ConfigError(f"'const' takes no arguments: {line!r}")
            return BasisFunction.constant()
        kv = _kv(rest, line)
        if head == "power":
            return BasisFunction.power(float(kv["lambda"]))
        if head in ("exp", "exponential"):
            return BasisFunction.exponential(float(kv["rate"]))
        if head == "table":
            path = Path(kv["file"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            t, v = read_table(path)
            return BasisFunction.table(t, v)
    except KeyError as exc:
        raise ConfigError(f"missing parameter {exc} in basis line {line!r}") from None
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad number in basis line {line!r}: {exc}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read table for {line!r}: {exc}") from None
    raise ConfigError(f"unknown basis function kind in {line!r}")


def parse_basis(text, base_dir=None):
    """Parse a basis specification: one function per line (``;`` also separates).

    Blank lines and ``#`` comments are ignored.
    """
    lines = []
    for raw in text.replace(";", "\n").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return FunctionBasis(tuple(parse_basis_function(l, base_dir) for l in lines))


def load_basis(spec):
    """Accept either a path to a basis file or an inline specification."""
    p = Path(spec)
    if p.is_file():
        return parse_basis(p.read_text(), base_dir=p.parent)
    return parse_basis(spec)


# -- Gramian ----------------------------------------------------------------

def _closed_pair(fi, fj, t):
    """Closed form of ``int_0^t fi fj`` or ``None`` when unavailable."""
    if fi.is_power and fj.is_power:
        p = fi.exponent + fj.exponent + 1.0
        return t**p / p
    if fi.kind == "exp" and fj.kind == "exp":
        s = fi.param + fj.param
        return -np.expm1(-s * t) / s
    if {fi.kind, fj.kind} <= {"const", "power", "exp"}:
        pw, ex = (fi, fj) if fi.is_power else (fj, fi)
        a = pw.exponent + 1.0
        mu = ex.param
        return special.gammainc(a, mu * t) * special.gamma(a) / mu**a
    return None


def _pair_integral(fi, fj, t):
    """``int_0^t fi fj`` for a scalar ``t`` (``t`` may be ``inf``)."""
    closed = _closed_pair(fi, fj, t) if np.isfinite(t) else None
    if closed is not None:
        return float(closed)
    points = []
    for f in (fi, fj):
        if f.kind == "table":
            points.extend(f.knots)
    upper = t
    tables = [f for f in (fi, fj) if f.kind == "table"]
    if tables:
        upper = min(t, min(f.knots[-1] for f in tables))
    if not upper > 0.0:
        return 0.0
    p = fi.exponent + fj.exponent
    return quadrature(lambda s: fi(s) * fj(s), 0.0, upper,
                      singular_power=p if p < 0 else None,
                      points=sorted(set(points)) or None)


def gramian(basis, t):
    """Gramian ``m_t = int_0^t f f^T``.

    ``t`` may be a scalar (result ``(n, n)``) or an array (result
    ``t.shape + (n, n)``).

    Raises
    ------
    ValueError
        For non-positive ``t``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0.0)):
        raise ValueError("the Gramian needs t > 0")
    n = basis.n
    m = np.empty(t.shape + (n, n))
    fs = basis.functions
    for i in range(n):
        for j in range(i, n):
            closed = _closed_pair(fs[i], fs[j], t)
            if closed is None:
                flat = np.array([_pair_integral(fs[i], fs[j], x) for x in t.ravel()])
                closed = flat.reshape(t.shape)
            m[..., i, j] = closed
            m[..., j, i] = closed
    return m


def gramian_infinity(basis):
    """``m_inf = int_0^inf f f^T`` for a basis whose members all have finite norm."""
    if np.any(basis.divergent):
        raise ValueError("m_inf is infinite for bases with divergent members")
    n = basis.n
    fs = basis.functions
    m = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            fi, fj = fs[i], fs[j]
            if fi.kind == "exp" and fj.kind == "exp":
                v = 1.0 / (fi.param + fj.param)
            else:
                v = _pair_integral(fi, fj, np.inf)
            m[i, j] = m[j, i] = v
    return m


def _invert_spd(m, t):
    """Inverse of a stack of SPD matrices via equilibrated Cholesky."""
    d = np.sqrt(np.diagonal(m, axis1=-2, axis2=-1))
    if np.any(~(d > 0.0)):
        raise IllConditionedError(t, np.inf)
    scale = d[..., :, None] * d[..., None, :]
    a = m / scale
    cond = np.linalg.cond(a)
    bad = ~(cond <= COND_LIMIT)
    if np.any(bad):
        idx = np.argmax(np.where(np.isfinite(cond), cond, np.inf))
        tt = np.asarray(t).ravel()
        where = float(tt[idx]) if tt.size > 1 else float(tt[0]) if tt.size else t
        raise IllConditionedError(where, float(np.ravel(cond)[idx]))
    chol = np.linalg.cholesky(a)
    eye = np.broadcast_to(np.eye(m.shape[-1]), chol.shape)
    linv = np.linalg.solve(chol, eye)
    ainv = np.swapaxes(linv, -1, -2) @ linv
    out = ainv / scale
    return 0.5 * (out + np.swapaxes(out, -1, -2))


def alpha(basis, t):
    """Inverse Gramian ``alpha_t``.

    Raises
    ------
    IllConditionedError
        If the equilibrated Gramian has condition number above ``1e12``.
    """
    t = np.asarray(t, dtype=float)
    return _invert_spd(gramian(basis, t), t)


def phi(basis, t):
    """Left factor of the Goursat kernel, ``phi(t) = alpha_t f(t)``."""
    t = np.asarray(t, dtype=float)
    return np.einsum("...ij,...j->...i", alpha(basis, t), basis(t))


@dataclass(frozen=True, eq=False)
class GramianState:
    t: float
    m: np.ndarray
    alpha: np.ndarray
    phi: np.ndarray


def gramian_state(basis, t):
    m = gramian(basis, t)
    a = _invert_spd(m, t)
    return GramianState(float(t), m, a, a @ basis(t))


# -- alpha_infinity -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AlphaInfinity:
    """Limit of ``alpha_t`` as ``t -> inf``.

    ``zero_rows[i]`` is true exactly when member ``i`` has divergent norm;
    ``method`` records how the limit was obtained and ``convergence`` the
    last extrapolation change (0 for closed forms).
    """

    matrix: np.ndarray
    zero_rows: np.ndarray
    method: str
    convergence: float = 0.0
    horizons: tuple = ()

    @property
    def is_zero(self):
        return bool(np.all(self.matrix == 0.0))


def _aitken(a0, a1, a2):
    """Entrywise geometric-rate extrapolation from three doubling horizons."""
    d1 = a1 - a0
    d2 = a2 - a1
    out = a2.copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        q = d2 / d1
    ok = np.isfinite(q) & (q > 0.0) & (q < 1.0) & (np.abs(d1) > 1e-300)
    out[ok] = a2[ok] + d2[ok] * q[ok] / (1.0 - q[ok])
    return out


def alpha_infinity(basis, *, t0=50.0, tol=1e-6, max_doublings=14):
    """``alpha_inf = lim alpha_t``.

    Closed form when every member has finite norm (invert ``m_inf``), the
    zero matrix when every member diverges, and extrapolation over doubling
    horizons ``t0 * 2**k`` otherwise.  Rows and columns of divergent members
    are set to exactly zero.

    Raises
    ------
    ConvergenceError
        If successive extrapolants disagree by more than ``tol``.
    """
    div = basis.divergent
    n = basis.n
    if np.all(div):
        return AlphaInfinity(np.zeros((n, n)), div.copy(), "all-divergent")
    if not np.any(div):
        m = gramian_infinity(basis)
        return AlphaInfinity(_invert_spd(m, np.inf), div.copy(), "closed-form")

    horizons = [t0 * 2.0**k for k in range(max_doublings + 1)]
    keep = ~(div[:, None] | div[None, :])
    seq, level1, level2 = [], [], []
    change = np.inf
    for k, T in enumerate(horizons):
        seq.append(alpha(basis, T))
        if len(seq) >= 3:
            level1.append(_aitken(*seq[-3:]))
        if len(level1) >= 3:
            level2.append(_aitken(*level1[-3:]))
        if len(level2) >= 2:
            e0, e1 = level2[-2], level2[-1]
            diff = np.abs(e1 - e0)[keep]
            scale = np.maximum(1.0, np.abs(e1)[keep])
            change = float(np.max(diff / scale)) if diff.size else 0.0
            if change <= tol:
                out = e1.copy()
                out[div, :] = 0.0
                out[:, div] = 0.0
                out = 0.5 * (out + out.T)
                return AlphaInfinity(out, div.copy(), "extrapolated", change,
                                     tuple(horizons[: k + 1]))
    raise ConvergenceError(
        f"alpha_t extrapolation did not settle (last change {change:.3e} > {tol})",
        {"horizons": horizons, "last_change": change},
    )


# -- orthonormal system -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrthonormalSystem:
    """``q(u) = b_t^T f(u)``, orthonormal in ``L2(0, t)``; ``b_t`` upper triangular."""

    t: float
    b: np.ndarray
    basis: FunctionBasis

    def __call__(self, u):
        return np.einsum("ik,...i->...k", self.b, self.basis(u))


def _mgs(coeffs, m):
    n = m.shape[0]
    q = coeffs.copy()
    for k in range(n):
        v = q[:, k]
        for j in range(k):
            v = v - (q[:, j] @ m @ v) * q[:, j]
        norm = np.sqrt(v @ m @ v)
        q[:, k] = v / norm
    return q


def orthonormalize(basis, t, tol=1e-8):
    """Modified Gram-Schmidt of ``f_1..f_n`` in ``L2(0, t)``.

    Works in coefficient space with the Gramian as inner product.  One
    re-orthogonalisation pass is made when the loss of orthogonality exceeds
    ``tol``.

    Raises
    ------
    ConvergenceError
        If orthogonality is still lost after re-orthogonalisation.
    """
    m = gramian(basis, t)
    eye = np.eye(basis.n)
    b = _mgs(eye, m)
    loss = np.max(np.abs(b.T @ m @ b - eye))
    if loss > tol:
        b = _mgs(b, m)
        loss = np.max(np.abs(b.T @ m @ b - eye))
        if loss > tol:
            raise ConvergenceError(f"Gram-Schmidt lost orthogonality ({loss:.2e}) at t={t}")
    b = np.triu(b)
    return OrthonormalSystem(float(t), b, basis)


# -- the inverse-Gramian identity ---------------------------------------------

def _phi_outer(basis):
    def fn(u):
        p = phi(basis, u)
        return np.outer(p, p)
    return fn


def phi_tail(basis, T):
    """``int_T^inf phi phi^T du``.

    Closed form for pure power bases (``phi_i(u) = phi_i(1) u**(-lambda_i-1)``)
    and for a single exponential; adaptive quadrature on the infinite range
    otherwise.
    """
    T = float(T)
    if basis.is_power:
        lam = basis.lambdas
        a = phi(basis, 1.0)
        p = lam[:, None] + lam[None, :] + 1.0
        return np.outer(a, a) * T ** (-p) / p
    if basis.n == 1 and basis.functions[0].kind == "exp":
        mu = basis.functions[0].param
        w = np.exp(-2.0 * mu * T)
        return np.array([[2.0 * mu * w / (1.0 - w)]])
    return quadrature_vec(_phi_outer(basis), T, np.inf)


def phi_tail_bound(basis, T):
    """``int_T^inf |phi|^2 du`` (trace of :func:`phi_tail`)."""
    return float(np.trace(phi_tail(basis, T)))


def verify_alpha_identity(basis, t, T, a_inf=None):
    """Residual ``alpha_t - int_t^T phi phi^T - int_T^inf phi phi^T - alpha_inf``.

    The finite part is integrated adaptively, the tail by :func:`phi_tail`.
    """
    if not T > t > 0:
        raise ValueError("need T > t > 0")
    if a_inf is None:
        a_inf = alpha_infinity(basis).matrix
    body = quadrature_vec(_phi_outer(basis), t, T)
    return alpha(basis, t) - body - phi_tail(basis, T) - a_inf
