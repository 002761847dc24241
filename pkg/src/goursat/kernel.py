"""Goursat-Volterra kernels ``k(t, s) = phi(t) . f(s)`` and their identities.

Besides the generic construction from a basis there are closed forms for
Müntz bases (``f_i(s) = s**lambda_i``) and for order one.  The ``check_*``
functions evaluate the self-reproduction identities by adaptive quadrature
and return residuals; they never raise on a failed identity.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import basis as _basis
from .basis import BasisFunction, FunctionBasis, alpha, alpha_infinity, gramian, phi_tail
from .errors import ConfigError, ConvergenceError, IllConditionedError, NumericalError
from .quadrature import gauss_legendre, quadrature

TAGS = ("generic", "muntz", "order1")


@dataclass(frozen=True, eq=False)
class GoursatKernel:
    """Volterra kernel of Goursat type with reproducing basis ``basis``.

    ``k(t, s) = phi(t) . f(s)`` for ``0 < s <= t`` and 0 for ``s > t``.
    For ``tag == "muntz"`` the left factor uses the closed form
    ``phi_i(t) = a_i t**(-lambda_i - 1)`` with ``coefficients = a``.
    """

    basis: FunctionBasis
    tag: str = "generic"
    coefficients: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ConfigError(f"unknown kernel tag {self.tag!r}")
        if self.tag == "muntz":
            if not self.basis.is_power or self.coefficients is None:
                raise ConfigError("a Müntz kernel needs a power basis and its coefficients")
            object.__setattr__(self, "coefficients", np.asarray(self.coefficients, dtype=float))

    @property
    def order(self):
        return self.basis.n

    def phi(self, t):
        """Left factor, shape ``t.shape + (n,)``."""
        t = np.asarray(t, dtype=float)
        if self.tag == "muntz":
            lam = self.basis.lambdas
            return self.coefficients * t[..., None] ** (-lam - 1.0)
        return _basis.phi(self.basis, t)

    def __call__(self, t, s):
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        inside = (s <= t) & (s > 0.0)
        tt = np.where(inside, t, 1.0)
        ss = np.where(inside, s, 1.0)
        if self.tag == "muntz":
            lam = self.basis.lambdas
            ratio = (ss / tt)[..., None] ** lam
            val = np.sum(self.coefficients * ratio, axis=-1) / tt
        else:
            val = np.sum(self.phi(tt) * self.basis(ss), axis=-1)
        return np.where(inside, val, 0.0)

    def describe(self):
        return self.label or f"{self.tag}: {self.basis.describe()}"


# -- constructors -------------------------------------------------------------

def goursat_kernel(basis):
    """Generic kernel ``phi(t) . f(s)`` with ``phi = alpha_t f(t)``."""
    return GoursatKernel(basis, "generic", label=f"generic {basis.describe()}")


def printed_muntz_coefficients(lambdas):
    """Coefficients with the denominator ``prod_{i != j} (lambda_i - lambda_j)``.

    Kept for comparison only: this convention fails self-reproduction for
    even orders (it differs by ``(-1)**(n-1)``).
    """
    lam = _check_lambdas(lambdas)
    n = lam.size
    out = np.empty(n)
    for j in range(n):
        num = np.prod(lam + lam[j] + 1.0)
        den = np.prod([lam[i] - lam[j] for i in range(n) if i != j])
        out[j] = num / den
    return out


def _check_lambdas(lambdas):
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    if lam.ndim != 1 or lam.size == 0:
        raise ConfigError("need at least one exponent")
    if np.any(~(lam > -0.5)):
        raise ConfigError(f"Müntz exponents must exceed -1/2, got {lam.tolist()}")
    if np.unique(lam).size != lam.size:
        raise ConfigError(f"Müntz exponents must be distinct, got {lam.tolist()}")
    return lam


def muntz_coefficients(lambdas, *, validate=True, rtol=1e-6):
    """Coefficients ``a_j`` of the Müntz kernel ``t**-1 sum_j a_j (s/t)**lambda_j``.

    ``a_j = prod_i (lambda_i + lambda_j + 1) / prod_{i != j} (lambda_j - lambda_i)``,
    which equals ``phi(1) = alpha_1 (1, ..., 1)``.  With ``validate`` the
    values are checked against that Gramian oracle (skipped when the oracle
    itself is too ill-conditioned to be trusted).

    Raises
    ------
    ConfigError
        For repeated exponents or exponents ``<= -1/2``.
    NumericalError
        If the product formula and the oracle disagree.
    """
    lam = _check_lambdas(lambdas)
    n = lam.size
    a = np.empty(n)
    for j in range(n):
        num = np.prod(lam + lam[j] + 1.0)
        den = np.prod([lam[j] - lam[i] for i in range(n) if i != j])
        a[j] = num / den
    if validate:
        try:
            oracle = alpha(FunctionBasis.powers(lam), 1.0).sum(axis=1)
        except IllConditionedError:
            return a
        err = np.max(np.abs(a - oracle)) / np.max(np.abs(oracle))
        if err > rtol:
            raise NumericalError(
                f"Müntz coefficients {a.tolist()} disagree with alpha_1 oracle {oracle.tolist()}"
            )
    return a


def muntz_kernel(lambdas):
    """Closed-form Müntz kernel; ``lambdas=(0,)`` gives ``k(t, s) = 1/t``."""
    lam = _check_lambdas(lambdas)
    a = muntz_coefficients(lam)
    label = "muntz " + ",".join(f"{x:g}" for x in lam)
    return GoursatKernel(FunctionBasis.powers(lam), "muntz", a, label)


def constant_kernel():
    return muntz_kernel([0.0])


def order_one_kernel(b):
    """``k(t, v) = b(t) b(v) / int_0^t b**2`` for a single basis function ``b``."""
    if not isinstance(b, BasisFunction):
        raise TypeError("order_one_kernel expects a BasisFunction")
    return GoursatKernel(FunctionBasis((b,)), "order1", label=f"order1 {b.describe()}")


def parse_kernel(text):
    """Parse ``muntz 0,1,2.5`` | ``const`` | ``order1 <basis line>`` | ``generic <basis>``.

    For ``generic`` the remainder is a path to a basis file or an inline
    specification with ``;`` separators.
    """
    text = text.strip()
    head, _, rest = text.partition(" ")
    head = head.lower()
    rest = rest.strip()
    if head in ("const", "constant"):
        return constant_kernel()
    if head == "muntz":
        try:
            lam = [float(x) for x in rest.replace(",", " ").split()]
        except ValueError:
            raise ConfigError(f"bad Müntz exponents in {text!r}") from None
        return muntz_kernel(lam)
    if head == "order1":
        return order_one_kernel(_basis.parse_basis_function(rest))
    if head == "generic":
        if not rest:
            raise ConfigError("generic kernel needs a basis")
        return goursat_kernel(_basis.load_basis(rest))
    raise ConfigError(f"unknown kernel specification {text!r}")


# -- kernel system --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KernelSystem:
    """Reproducing kernel ``kappa_t(u, v) = f(u) . alpha_t f(v)`` on ``(0, t]**2``."""

    t: float
    alpha: np.ndarray
    basis: FunctionBasis

    def __call__(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        if np.any((u <= 0) | (v <= 0) | (u > self.t) | (v > self.t)):
            raise ValueError(f"kernel system arguments must lie in (0, {self.t}]")
        return np.einsum("...i,ij,...j->...", self.basis(u), self.alpha, self.basis(v))


def kernel_system(basis, t):
    if not t > 0:
        raise ValueError("need t > 0")
    return KernelSystem(float(t), alpha(basis, t), basis)


# -- identity checks --------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    """Residual of an identity together with the magnitude it is measured against."""

    residual: float
    scale: float

    @property
    def relative(self):
        return abs(self.residual) / self.scale if self.scale > 0 else abs(self.residual)


def _near_zero_power(k):
    return 2.0 * float(np.min(k.basis.lambdas))


def check_self_reproduction(k, t, s, tol=1e-12):
    """``k(t,s) - int_0^s k(t,u) k(s,u) du``.

    The scale is ``int_0^s |k(t,u) k(s,u)| du``, which bounds both terms.
    """
    if not 0 < s <= t:
        raise ValueError("need 0 < s <= t")
    p = _near_zero_power(k)
    sp = p if p < 0 else None
    # for u <= s <= t both factors are rows phi(.) . f(u); hoist the rows
    pt, ps = k.phi(float(t)), k.phi(float(s))
    f = k.basis

    def integrand(u):
        fu = f(u)
        return (pt @ fu) * (ps @ fu)

    integral = quadrature(integrand, 0.0, s, tol, singular_power=sp)
    scale = quadrature(lambda u: abs(integrand(u)), 0.0, s, 1e-8, singular_power=sp)
    kts = float(k(t, s))
    return CheckResult(kts - integral, max(scale, abs(kts)))


def check_tail_reproduction(k, t, s, T, a_inf=None, tol=1e-12):
    """``k(t,s) - int_t^T k(u,t) k(u,s) du - tail(T) - f(t) . alpha_inf f(s)``.

    ``tail(T) = f(t) . (int_T^inf phi phi^T) f(s)`` from the basis' closed
    forms (quadrature for other bases).
    """
    if not 0 < s <= t < T:
        raise ValueError("need 0 < s <= t < T")
    if a_inf is None:
        a_inf = alpha_infinity(k.basis).matrix
    ft, fs = k.basis(t), k.basis(s)
    integral = quadrature(lambda u: k(u, t) * k(u, s), t, T, tol)
    tail = ft @ phi_tail(k.basis, T) @ fs
    const = ft @ a_inf @ fs
    kts = float(k(t, s))
    scale = max(abs(kts), abs(integral) + abs(tail) + abs(const))
    return CheckResult(kts - integral - tail - const, scale)


@dataclass(frozen=True, eq=False)
class IntegrabilityVerdict:
    """Outcome of :func:`check_integrability`.

    ``panels[j]`` is the integral over ``[t 2**-(j+1), t 2**-j]``; ``decay``
    the geometric-mean ratio of the last six successive panels.
    """

    finite: bool
    value: float
    panels: np.ndarray
    decay: float


def _inner_norm(k, u):
    """``(int_0^u k(u,v)**2 dv)**(1/2) = (phi(u) . m_u phi(u))**(1/2)``."""
    p = k.phi(u)
    m = gramian(k.basis, u)
    return np.sqrt(np.einsum("...i,...ij,...j->...", p, m, p))


def check_integrability(k, t, max_panels=40, growth=10.0, window=6):
    """Decide whether ``int_0^t (int_0^u k(u,v)**2 dv)**(1/2) du`` is finite.

    The range is cut into dyadic panels towards 0.  Refinement stops at
    ``max_panels`` or where the integrand can no longer be evaluated.  With
    ``r`` the mean panel ratio over the last ``window`` refinements, the
    unseen remainder is extrapolated as ``P_last r / (1 - r)``; the integral
    is declared divergent when that exceeds ``growth`` times what has been
    accumulated (always when ``r >= 1``).
    """
    if not t > 0:
        raise ValueError("need t > 0")
    x, w = gauss_legendre(20)
    panels = []
    hi = float(t)
    for _ in range(max_panels):
        lo = hi / 2.0
        nodes = lo + (hi - lo) * x
        try:
            with np.errstate(all="ignore"):
                vals = _inner_norm(k, nodes)
        except (NumericalError, ValueError, np.linalg.LinAlgError):
            break
        if not np.all(np.isfinite(vals)):
            break
        panels.append(float((hi - lo) * np.dot(w, vals)))
        hi = lo
    panels = np.array(panels)
    if panels.size < window + 1:
        raise ConvergenceError(
            f"only {panels.size} panels could be evaluated near 0; need {window + 1}",
            {"panels": panels},
        )
    tail = panels[-(window + 1):]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = tail[1:] / tail[:-1]
    if np.any(~(ratios > 0)):
        decay = float(np.max(np.abs(ratios)))
    else:
        decay = float(np.exp(np.mean(np.log(ratios))))
    total = float(panels.sum())
    if decay >= 1.0:
        return IntegrabilityVerdict(False, np.inf, panels, decay)
    remainder = panels[-1] * decay / (1.0 - decay)
    if remainder > growth * total:
        return IntegrabilityVerdict(False, np.inf, panels, decay)
    return IntegrabilityVerdict(True, total + remainder, panels, decay)


@dataclass(frozen=True, eq=False)
class HardyResult:
    """``(K g)`` at the right end of every cell and the norm ratio ``|K g| / |g|``."""

    points: np.ndarray
    values: np.ndarray
    norm_g: float
    norm_kg: float

    @property
    def ratio(self):
        return self.norm_kg / self.norm_g if self.norm_g > 0 else 0.0


def _tail_matrix(kernel, T):
    """``int_T^inf phi phi^T`` for the kernel's own left factor."""
    if kernel.tag == "muntz":
        lam = kernel.basis.lambdas
        a = kernel.coefficients
        p = lam[:, None] + lam[None, :] + 1.0
        return np.outer(a, a) * T ** (-p) / p
    return phi_tail(kernel.basis, T)


def hardy_apply(kernel, breaks, values, nodes=16, tail=True):
    """Apply ``(K g)(u) = int_0^u k(u, r) g(r) dr`` to a step function.

    ``g`` equals ``values[i]`` on ``[breaks[i], breaks[i+1])`` with
    ``breaks[0] == 0`` and vanishes afterwards.  Inner integrals are exact
    through the basis primitive, ``(K g)(u) = phi(u) . int_0^u f g``; the
    outer L2 norm uses a Gauss-Legendre rule inside every cell.  Past the
    support ``K g = phi . c`` with ``c`` fixed, and with ``tail`` its norm
    ``c^T (int phi phi^T) c`` is added from the closed-form tail.
    """
    if isinstance(kernel, FunctionBasis):
        kernel = goursat_kernel(kernel)
    breaks = np.asarray(breaks, dtype=float)
    values = np.asarray(values, dtype=float)
    if breaks[0] != 0.0 or np.any(np.diff(breaks) <= 0) or values.size != breaks.size - 1:
        raise ValueError("breaks must start at 0, increase, and have one more entry than values")
    F = kernel.basis.primitive(breaks)
    cum = np.concatenate([np.zeros((1, F.shape[1])),
                          np.cumsum(values[:, None] * np.diff(F, axis=0), axis=0)])
    x, w = gauss_legendre(nodes)
    width = np.diff(breaks)
    u = breaks[:-1, None] + width[:, None] * x[None, :]
    inner = cum[:-1, None, :] + values[:, None, None] * (kernel.basis.primitive(u) - F[:-1, None, :])
    kg = np.sum(kernel.phi(u) * inner, axis=-1)
    sq = float(np.sum(width[:, None] * w[None, :] * kg**2))
    if tail:
        c = cum[-1]
        sq += float(c @ _tail_matrix(kernel, breaks[-1]) @ c)
    norm_kg = float(np.sqrt(sq))
    norm_g = float(np.sqrt(np.sum(values**2 * width)))
    end = breaks[1:]
    kg_end = np.sum(kernel.phi(end) * cum[1:], axis=-1)
    return HardyResult(end, kg_end, norm_g, norm_kg)
