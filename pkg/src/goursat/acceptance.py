"""The twelve acceptance checks as runnable functions.

Each runner returns a :class:`CriterionResult` with the measured quantity,
the threshold it was held to and the wall time.  The Brownian ensembles
shared by checks 4 and 5 are cached per seed.
"""

import contextlib
import functools
import io
import inspect
import os
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import basis as _basis
from .basis import BasisFunction, FunctionBasis, alpha_infinity
from .bridge import BridgeSpec, SolutionSpec, bridge_values, solution_values
from .harmonic import EndpointLaw, martingale_check
from .kernel import (check_self_reproduction, constant_kernel, goursat_kernel, hardy_apply,
                     muntz_coefficients, muntz_kernel, order_one_kernel,
                     printed_muntz_coefficients)
from .paths import RngSpec, TimeGrid, brownian_values, ito_values, map_batches, refine_values
from .stats import BAND, allowed_violations, independence_test, jackknife_cov
from .transform import (TransformPlan, XZeroPlan, iterate_values, laguerre_values,
                        recover_values, transform_values, x_zero_grid, x_zero_values)

DEFAULT_SEED = 20240601


@dataclass
class CriterionResult:
    ident: str
    title: str
    passed: bool
    measured: float
    threshold: float
    runtime: float = 0.0
    details: list = field(default_factory=list)

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return (f"{tag} {self.ident}: {self.title} | measured {self.measured:.6g} "
                f"vs {self.threshold:.6g} | {self.runtime:.2f}s")


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.runtime = time.perf_counter() - t0
        return res
    return wrapper


def exponential_basis(rate=1.0):
    return FunctionBasis((BasisFunction.exponential(rate),))


def shipped_kernels():
    """Kernels shipped with the library: constant, two Müntz kernels, order-1 exponential."""
    return [constant_kernel(), muntz_kernel([0, 1]), muntz_kernel([0, 1, 2]),
            order_one_kernel(BasisFunction.exponential(1.0))]


# -- 1 ------------------------------------------------------------------------

@_timed
def ac1(seed=DEFAULT_SEED):
    """Inverse-Gramian identity at t in {0.5, 1, 2} for Müntz(0,1) and exponential bases."""
    worst = 0.0
    details = []
    for name, b in [("muntz 0,1", FunctionBasis.powers([0, 1])), ("exp 1", exponential_basis())]:
        a_inf = alpha_infinity(b).matrix
        for t in (0.5, 1.0, 2.0):
            r = float(np.max(np.abs(_basis.verify_alpha_identity(b, t, 10.0, a_inf))))
            details.append(f"{name} t={t:g}: max residual {r:.3e}")
            worst = max(worst, r)
    return CriterionResult("AC1", "inverse-Gramian identity", worst <= 1e-6, worst, 1e-6,
                           details=details)


# -- 2 ------------------------------------------------------------------------

@_timed
def ac2(seed=DEFAULT_SEED):
    """Self-reproduction on a 10x10 (t, s) grid for the shipped kernels."""
    ts = np.geomspace(0.1, 10.0, 10)
    rs = np.linspace(0.1, 1.0, 10)
    worst = 0.0
    details = []
    for k in shipped_kernels():
        w = 0.0
        for t in ts:
            for r in rs:
                w = max(w, check_self_reproduction(k, t, r * t).relative)
        details.append(f"{k.describe()}: worst relative residual {w:.3e}")
        worst = max(worst, w)
    return CriterionResult("AC2", "self-reproduction", worst <= 1e-6, worst, 1e-6, details=details)


# -- 3 ------------------------------------------------------------------------

@_timed
def ac3(seed=DEFAULT_SEED):
    """Müntz(0,1) coefficients against the 2x2 Gramian-inversion oracle."""
    a = muntz_coefficients([0, 1], validate=False)
    oracle = _basis.alpha(FunctionBasis.powers([0, 1]), 1.0).sum(axis=1)
    err = float(np.max(np.abs(a - np.array([-2.0, 6.0]))))
    oracle_err = float(np.max(np.abs(oracle - np.array([-2.0, 6.0]))))
    printed = printed_muntz_coefficients([0, 1])
    details = [f"coefficients {a.tolist()}", f"alpha_1 (1,1) oracle {oracle.tolist()}",
               f"denominator prod(lambda_i - lambda_j) gives {printed.tolist()} "
               f"(opposite sign, fails self-reproduction)"]
    ok = err == 0.0 and oracle_err < 1e-12
    return CriterionResult("AC3", "Müntz coefficients (-2, 6)", ok, max(err, oracle_err), 0.0,
                           details=details)


# -- 4 and 5 ------------------------------------------------------------------

COV_TIMES = (0.25, 0.5, 0.75, 1.0)
SAMPLE_TIMES = tuple(np.arange(1, 9) / 8.0)


@functools.lru_cache(maxsize=4)
def _transform_ensemble(seed, n_paths, threads=1):
    """Sigma(B) at the check times and I_1 for both kernels, plus B for the control."""
    grid = TimeGrid.build(1.0, dt=5e-4, eps0=1e-4)
    rng = RngSpec(seed)
    kernels = {"constant": constant_kernel(), "muntz 0,1": muntz_kernel([0, 1])}
    plans = {name: TransformPlan.build(k, grid) for name, k in kernels.items()}
    cov_idx = [grid.index(t) for t in COV_TIMES]
    smp_idx = [grid.index(t) for t in SAMPLE_TIMES]
    names = list(kernels)

    def fn(idx):
        B = brownian_values(grid, rng, idx)
        out = [B[:, smp_idx]]
        for name in names:
            S = transform_values(plans[name], B)[0]
            I1 = ito_values(plans[name].weights, B)[:, -1, :]
            out += [S[:, cov_idx], S[:, smp_idx], I1]
        return tuple(out)

    res = map_batches(fn, n_paths, batch=500, threads=threads)
    data = {"B": res[0]}
    for j, name in enumerate(names):
        data[name] = {"cov": res[1 + 3 * j], "sample": res[2 + 3 * j], "I": res[3 + 3 * j]}
    return data


@_timed
def ac4(seed=DEFAULT_SEED, n_paths=20000, threads=1):
    """cov(Sigma(B)_s, Sigma(B)_t) within 4 SE of s^t on a 4x4 grid."""
    data = _transform_ensemble(seed, n_paths, threads)
    worst = 0.0
    ok = True
    details = []
    for name in ("constant", "muntz 0,1"):
        X = data[name]["cov"]
        zs = []
        for i, s in enumerate(COV_TIMES):
            for j, t in enumerate(COV_TIMES):
                e = jackknife_cov(X[:, i], X[:, j])
                zs.append(abs(e.z(min(s, t))))
        ok &= max(zs) <= BAND
        worst = max(worst, max(zs))
        details.append(f"{name}: max |z| {max(zs):.2f} over 16 entries")
    return CriterionResult("AC4", "Wiener-measure preservation", ok, worst, BAND, details=details)


@_timed
def ac5(seed=DEFAULT_SEED, n_paths=20000, threads=1):
    """corr(I_t, Sigma(B)) within 4 SE of 0; negative control corr(I_t, B) outside."""
    data = _transform_ensemble(seed, n_paths, threads)
    details = []
    viol = 0
    count = 0
    worst = 0.0
    for name in ("constant", "muntz 0,1"):
        rep = independence_test(data[name]["I"], data[name]["sample"])
        viol += rep.violations
        count += rep.corr.size
        worst = max(worst, rep.max_z)
        details.append(f"{name}: {rep.violations} of {rep.corr.size} outside the band, "
                       f"max |z| {rep.max_z:.2f}")
    allowed = allowed_violations(count)
    control = independence_test(data["constant"]["I"], data["B"])
    details.append(f"control corr(I_1, B): min |z| {float(np.min(control.z)):.1f}")
    ok = viol <= allowed and float(np.min(control.z)) > BAND
    return CriterionResult("AC5", "independence surrogate", ok, worst, BAND, details=details)


# -- 6 ------------------------------------------------------------------------

@_timed
def ac6(seed=DEFAULT_SEED, n_paths=100):
    """Bridge endpoint identity and Sigma(B^y) = Sigma(B) over 100 paths."""
    grid = TimeGrid.build(1.0, dt=5e-4, eps0=1e-4)
    k = muntz_kernel([0, 1])
    plan = TransformPlan.build(k, grid)
    B = brownian_values(grid, RngSpec(seed), range(n_paths))
    S = transform_values(plan, B)[0]
    worst_end = worst_sup = 0.0
    details = []
    for y in ((0.0, 0.0), (1.0, -2.0)):
        By = bridge_values(BridgeSpec(k.basis, 1.0, y), grid, B)
        end = ito_values(plan.weights, By)[:, -1, :]
        e = float(np.max(np.abs(end - np.array(y))))
        d = float(np.max(np.abs(transform_values(plan, By)[0] - S)))
        details.append(f"y={y}: endpoint error {e:.2e}, sup|Sigma(B^y)-Sigma(B)| {d:.2e}")
        worst_end = max(worst_end, e)
        worst_sup = max(worst_sup, d)
    worst = max(worst_end, worst_sup)
    return CriterionResult("AC6", "bridge identities", worst <= 5e-3, worst, 5e-3, details=details)


# -- 7 ------------------------------------------------------------------------

@_timed
def ac7(seed=DEFAULT_SEED, n_paths=5000, n_cov=20000, threads=1):
    """Planted Y recovered at T=8; Gaussian Y on the exponential basis gives Brownian X."""
    details = []
    rng = RngSpec(seed)
    k = muntz_kernel([0, 1])
    T = 8.0
    grid = x_zero_grid(k.basis, T, eps0=1e-4 * T)
    plan = XZeroPlan.build(k, grid, T)
    y = np.array([1.0, -2.0])
    gT = grid.truncate(T)

    def recover(idx):
        W = brownian_values(grid, rng, idx)
        X = solution_values(plan, W, np.tile(y, (len(idx), 1)))
        return recover_values(k.basis, gT, X, T)[0][:, 2, :]

    Y = map_batches(recover, n_paths, batch=500, threads=threads)
    mean = Y.mean(0)
    se = Y.std(0, ddof=1) / np.sqrt(n_paths)
    z1 = np.abs(mean - y) / se
    details.append(f"recovered Y {mean.round(4).tolist()} +- {se.round(4).tolist()}")

    eb = exponential_basis()
    ek = goursat_kernel(eb)
    T2 = 4.0
    g2 = x_zero_grid(eb, T2, eps0=1e-4 * T2)
    p2 = XZeroPlan.build(ek, g2, T2)
    spec = SolutionSpec(ek, "gaussian", a_inf=alpha_infinity(eb))
    times = (0.5, 1.0, 2.0, 4.0)
    idx_t = [g2.index(t) for t in times]
    rng2 = RngSpec(seed + 1)

    def family(idx):
        W = brownian_values(g2, rng2, idx)
        return solution_values(p2, W, spec.draw(rng2, idx))[:, idx_t]

    X = map_batches(family, n_cov, batch=500, threads=threads)
    zs = [abs(jackknife_cov(X[:, i], X[:, j]).z(min(s, t)))
          for i, s in enumerate(times) for j, t in enumerate(times)]
    details.append(f"exponential basis, Y ~ N(0, alpha_inf): max |z| {max(zs):.2f} over 16 entries")
    worst = max(float(z1.max()), max(zs))
    return CriterionResult("AC7", "solution family closed loop", worst <= BAND, worst, BAND,
                           details=details)


# -- 8 ------------------------------------------------------------------------

@_timed
def ac8(seed=DEFAULT_SEED, n_paths=20000, threads=1):
    """Var(X0_1) for the exponential basis against 1 - 2(1 - 1/e)^2."""
    eb = exponential_basis()
    k = goursat_kernel(eb)
    grid = x_zero_grid(eb, 1.0, dt=5e-4, eps0=1e-4)
    plan = XZeroPlan.build(k, grid, 1.0)
    rng = RngSpec(seed)
    X1 = map_batches(lambda idx: x_zero_values(plan, brownian_values(grid, rng, idx))[:, -1],
                     n_paths, batch=500, threads=threads)
    target = 1.0 - 2.0 * (1.0 - np.exp(-1.0)) ** 2
    e = jackknife_cov(X1, X1)
    z = abs(e.z(target))
    return CriterionResult("AC8", "Var(X0_1) for the exponential basis", z <= BAND, z, BAND,
                           details=[f"Var(X0_1) = {e}; target {target:.6f}"])


# -- 9 ------------------------------------------------------------------------

@_timed
def ac9(seed=DEFAULT_SEED, path_index=0):
    """Iterated transform (m=2) vs the Laguerre form; shrinkage under refinement."""
    k = constant_kernel()
    grid = TimeGrid.build(1.0, dt=5e-4, eps0=1e-4)
    rng = RngSpec(seed)
    B = brownian_values(grid, rng, [path_index])
    d0 = float(np.max(np.abs(iterate_values(TransformPlan.build(k, grid), B, 2)
                              - laguerre_values(2, grid, B))))
    fine = grid.refine()
    Bf = refine_values(fine, grid, B, rng, path_index)
    d1 = float(np.max(np.abs(iterate_values(TransformPlan.build(k, fine), Bf, 2)
                              - laguerre_values(2, fine, Bf))))
    ratio = d0 / d1 if d1 > 0 else np.inf
    details = [f"sup difference {d0:.3e} at dt=5e-4, {d1:.3e} after halving (ratio {ratio:.2f})"]
    ok = d0 <= 1e-2 and ratio >= 1.5
    return CriterionResult("AC9", "Laguerre equivalence", ok, d0, 1e-2, details=details)


# -- 10 -----------------------------------------------------------------------

def random_step_function(gen, horizon=10.0, max_steps=30):
    nb = int(gen.integers(1, max_steps + 1))
    breaks = np.concatenate([[0.0], np.sort(gen.uniform(0.0, horizon, nb))])
    return breaks, gen.standard_normal(nb)


@_timed
def ac10(seed=DEFAULT_SEED, n_functions=100):
    """|K g| / |g| <= 2.05 for random step functions, every shipped kernel."""
    gen = np.random.default_rng(seed)
    worst = 0.0
    details = []
    for k in shipped_kernels():
        r = max(hardy_apply(k, *random_step_function(gen)).ratio for _ in range(n_functions))
        details.append(f"{k.describe()}: max ratio {r:.4f}")
        worst = max(worst, r)
    return CriterionResult("AC10", "Hardy bound", worst <= 2.05, worst, 2.05, details=details)


# -- 11 -----------------------------------------------------------------------

@_timed
def ac11(seed=DEFAULT_SEED, n_paths=20000, threads=1):
    """E[h(t, I_t)] = 1 within 4 SE for two (basis, law) pairs at t in {0.5, 1}."""
    cases = [("f=1, point mass 0.5", FunctionBasis.powers([0]), EndpointLaw.point(0.5)),
             ("f=(1,s), N(0,I)", FunctionBasis.powers([0, 1]), EndpointLaw.gaussian(np.eye(2)))]
    worst = 0.0
    details = []
    for c, (name, b, law) in enumerate(cases):
        for t in (0.5, 1.0):
            e = martingale_check(b, law, t, n_paths, RngSpec(seed + 10 * c), threads=threads)
            z = abs(e.z(1.0))
            worst = max(worst, z)
            details.append(f"{name}, t={t:g}: {e} (|z| {z:.2f})")
    return CriterionResult("AC11", "harmonic martingale", worst <= BAND, worst, BAND,
                           details=details)


# -- 12 -----------------------------------------------------------------------

CLI_SMOKE = [
    ["verify-kernel", "--kernel", "muntz 0,1"],
    ["transform", "--kernel", "muntz 0,1", "--paths", "600", "--save-paths", "2"],
    ["bridge", "--basis", "power lambda=0; power lambda=1", "--t1", "1", "--y", "1,-2",
     "--paths", "600", "--save-paths", "2"],
    ["sde-solve", "--kernel", "muntz 0,1", "--y", "1,-2", "--T", "2", "--paths", "600"],
    ["sde-solve", "--basis", "exp rate=1", "--y-source", "gaussian", "--T", "2",
     "--paths", "600"],
    ["harmonic", "--basis", "const", "--law", "point:0.5", "--t", "1", "--paths", "600"],
    ["report", "--suite", "AC1,AC3"],
]


def _csv_bytes(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            if f.endswith(".csv") or f == "manifest.json":
                p = os.path.join(dirpath, f)
                with open(p, "rb") as fh:
                    out[os.path.relpath(p, root)] = fh.read()
    return out


@_timed
def ac12(seed=DEFAULT_SEED, commands=None):
    """Every CLI command twice, under 1 and 8 threads: byte-identical CSVs and manifests."""
    from .cli import main

    commands = CLI_SMOKE if commands is None else commands
    mismatches = []
    details = []
    with tempfile.TemporaryDirectory() as tmp:
        for c, cmd in enumerate(commands):
            outs = []
            for run, threads in enumerate((1, 8)):
                d = os.path.join(tmp, f"{c}-{run}")
                with contextlib.redirect_stdout(io.StringIO()):
                    code = main(cmd + ["--seed", str(seed), "--threads", str(threads), "--out", d])
                outs.append((code, _csv_bytes(d)))
            same = outs[0] == outs[1] and len(outs[0][1]) > 0
            details.append(f"{cmd[0]}: exit {outs[0][0]}/{outs[1][0]}, "
                           f"{len(outs[0][1])} files, {'identical' if same else 'DIFFER'}")
            if not same:
                mismatches.append(cmd[0])
    return CriterionResult("AC12", "CLI determinism across thread counts", not mismatches,
                           float(len(mismatches)), 0.0, details=details)


RUNNERS = {f"AC{i}": fn for i, fn in enumerate(
    (ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10, ac11, ac12), start=1)}


def run_suite(ids=None, seed=DEFAULT_SEED, threads=1):
    """Run the named checks (all by default) and return their results in order."""
    ids = list(RUNNERS) if ids is None else [i.upper() for i in ids]
    out = []
    for ident in ids:
        fn = RUNNERS[ident]
        kwargs = {"seed": seed}
        if "threads" in inspect.signature(fn).parameters:
            kwargs["threads"] = threads
        out.append(fn(**kwargs))
    return out
