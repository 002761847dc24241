import numpy as np
import pytest
from scipy import stats as sps

from goursat.errors import ConfigError
from goursat.stats import (BrownianityReport, McEstimate, allowed_violations, brownianity_suite,
                           correlation_matrix, covariance_estimate, independence_test,
                           jackknife_cov, mean_estimate)
from goursat.paths import RngSpec, TimeGrid, brownian_values


def brute_jackknife(x, y):
    n = x.size
    loo = np.array([np.cov(np.delete(x, i), np.delete(y, i))[0, 1] for i in range(n)])
    return np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))


def test_jackknife_matches_brute_force(gen):
    x = gen.standard_normal(200)
    y = 0.5 * x + gen.standard_normal(200)
    e = jackknife_cov(x, y)
    assert e.mean == pytest.approx(np.cov(x, y)[0, 1], rel=1e-12)
    assert e.se == pytest.approx(brute_jackknife(x, y), rel=1e-9)


def test_jackknife_with_large_offset(gen):
    x = 1e6 + gen.standard_normal(100)
    e = jackknife_cov(x, x)
    assert e.se == pytest.approx(brute_jackknife(x - 1e6, x - 1e6), rel=1e-6)


def test_mean_estimate(gen):
    x = gen.standard_normal(1000)
    e = mean_estimate(x)
    assert e.se == pytest.approx(x.std(ddof=1) / np.sqrt(1000))
    assert e.within(e.mean) and e.z(e.mean) == 0.0
    with pytest.raises(ConfigError):
        mean_estimate([1.0])


def test_zero_se_z():
    assert McEstimate(1.0, 0.0, 5).z(1.0) == 0.0
    assert McEstimate(1.0, 0.0, 5).z(2.0) == -np.inf


def test_allowed_violations():
    assert allowed_violations(16) == 1
    assert allowed_violations(1_000_000) == int(1_000_000 * 2 * sps.norm.sf(4)) + 1


def test_correlation_matrix(gen):
    a = gen.standard_normal((500, 2))
    b = np.column_stack([a[:, 0], gen.standard_normal(500)])
    r, se = correlation_matrix(a, b)
    assert r[0, 0] == pytest.approx(1.0)
    assert r[1, 1] == pytest.approx(np.corrcoef(a[:, 1], b[:, 1])[0, 1])
    assert se[0, 0] == pytest.approx(0.0, abs=1e-12)
    rep = independence_test(a, b)
    assert np.isinf(rep.z[0, 0]) and rep.violations >= 1


def test_independence_passes_on_independent_data(gen):
    rep = independence_test(gen.standard_normal((4000, 3)), gen.standard_normal((4000, 8)))
    assert rep.passed and rep.allowed == 1


def test_brownianity_suite():
    g = TimeGrid.build(1.0, dt=0.01)
    B = brownian_values(g, RngSpec(2), range(5000))
    times = [0.25, 0.5, 0.75, 1.0]
    rep = brownianity_suite(B[:, [g.index(t) for t in times]], times)
    assert isinstance(rep, BrownianityReport)
    assert len(rep.checks) == 10 + 4
    assert rep.passed
    assert covariance_estimate(B, 0.5, 1.0, g).within(0.5)
    with pytest.raises(ConfigError):
        covariance_estimate(B[:10], 0.5, 1.0, g)


def test_brownianity_rejects_scaled_motion():
    g = TimeGrid.build(1.0, dt=0.01)
    B = 1.2 * brownian_values(g, RngSpec(2), range(5000))
    times = [0.5, 1.0]
    assert not brownianity_suite(B[:, [g.index(t) for t in times]], times).passed


def test_progressive_decomposition():
    """alpha_t I_t = alpha_T I_T - int_t^T phi dSigma(B), and it is blind to Sigma(B) on (0, t]."""
    from goursat.basis import alpha
    from goursat.kernel import muntz_kernel
    from goursat.paths import ito_values
    from goursat.stats import progressive_decomposition_test
    from goursat.transform import TransformPlan, transform_values

    k = muntz_kernel([0, 1])
    T, t = 2.0, 1.0
    g = TimeGrid.build(T, dt=1e-3, eps0=1e-5)
    plan = TransformPlan.build(k, g)
    Bv = brownian_values(g, RngSpec(17), range(3000))
    S = transform_values(plan, Bv)[0]
    I = ito_values(plan.weights, Bv)
    it = g.index(t)
    Y = I[:, -1, :] @ alpha(k.basis, T).T
    phi_avg = plan.P / np.diff(g.times)[:, None]
    dS = np.diff(S, axis=1)
    tail = np.einsum("pk,ki->pi", dS[:, it:], phi_avg[it:])
    sample = [g.index(s) for s in (0.25, 0.5, 0.75, 1.0)]
    rep, rms, expected = progressive_decomposition_test(k.basis, t, I[:, it, :], Y, tail,
                                                        S[:, sample])
    assert np.all(rms < 5e-3)
    assert rep.passed
    assert np.all(expected == 0)
