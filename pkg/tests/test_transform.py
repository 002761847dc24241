import numpy as np
import pytest
from scipy import integrate
from scipy.special import eval_laguerre, genlaguerre

from goursat.basis import parse_basis
from goursat.errors import TruncationError
from goursat.kernel import constant_kernel, goursat_kernel, muntz_kernel
from goursat.paths import RngSpec, SamplePath, TimeGrid, brownian_values
from goursat.transform import (TransformPlan, XZeroPlan, iterate_values, laguerre,
                               laguerre_coefficients, laguerre_values, recover_values,
                               transform_values, truncation_fraction, volterra_transform,
                               x_zero, x_zero_grid, x_zero_horizon, x_zero_values)


def test_constant_kernel_annihilates_t(grid):
    out = volterra_transform(constant_kernel(), SamplePath(grid, grid.times, "deterministic"))
    assert np.max(np.abs(out.path.values)) < 1e-12


@pytest.mark.parametrize("lams", [[0, 1], [0, 1, 2]])
def test_muntz_kernel_annihilates_its_primitives(grid, lams):
    k = muntz_kernel(lams)
    plan = TransformPlan.build(k, grid)
    F = k.basis.primitive(grid.times).T
    out = transform_values(plan, F)[0]
    assert np.max(np.abs(out)) < 1e-5


def test_transform_is_linear(grid, rng):
    plan = TransformPlan.build(muntz_kernel([0, 1]), grid)
    B = brownian_values(grid, rng, [0, 1])
    lhs = transform_values(plan, 2.0 * B[0] - 3.0 * B[1])[0]
    rhs = 2.0 * transform_values(plan, B[0])[0] - 3.0 * transform_values(plan, B[1])[0]
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_constant_kernel_on_power_path(grid):
    # Sigma(t^2) = t^2 - int_0^t u^2/u du = t^2 / 2; exact up to the interpolation of t^2
    x = grid.times ** 2
    out = transform_values(TransformPlan.build(constant_kernel(), grid), x)[0]
    np.testing.assert_allclose(out, x / 2, atol=2e-6)


def test_generic_matches_muntz(grid, rng):
    B = brownian_values(grid, rng, [3])
    k1 = muntz_kernel([0, 1])
    k2 = goursat_kernel(k1.basis)
    a = transform_values(TransformPlan.build(k1, grid), B)[0]
    b = transform_values(TransformPlan.build(k2, grid), B)[0]
    np.testing.assert_allclose(a, b, atol=1e-8)


def test_laguerre_coefficients_oracle():
    for n in range(5):
        np.testing.assert_allclose(laguerre_coefficients(n), genlaguerre(n, 0).coeffs[::-1],
                                   atol=1e-12)
    assert laguerre(2, 1.5) == pytest.approx(eval_laguerre(2, 1.5))


def test_single_transform_is_first_laguerre(grid, rng):
    B = brownian_values(grid, rng, [0])
    a = transform_values(TransformPlan.build(constant_kernel(), grid), B)[0]
    b = laguerre_values(1, grid, B)
    assert np.max(np.abs(a - b)) < 5e-3


def test_iterated_transform_close_to_laguerre(grid, rng):
    B = brownian_values(grid, rng, [0])
    a = iterate_values(TransformPlan.build(constant_kernel(), grid), B, 2)
    assert np.max(np.abs(a - laguerre_values(2, grid, B))) < 1e-2


def test_laguerre_values_deterministic_oracle():
    # int_0^t L_2(log(t/s)) ds with x(s) = s; substitution gives t * int_0^inf L_2(v) e^-v dv = 0
    g = TimeGrid.build(1.0, dt=1e-3, eps0=1e-6)
    out = laguerre_values(2, g, g.times)
    assert np.max(np.abs(out[g.n_geometric:])) < 1e-3


def test_truncation_fraction_against_quadrature():
    b = parse_basis("exp rate=1")
    T, tmax = 1.0, 5.0
    tail = integrate.quad(lambda u: 1 / np.sinh(u) ** 2, tmax, 60.0, epsabs=1e-15)[0]
    t = np.linspace(T / 64, T, 64)
    want = np.max((1 - np.exp(-t)) ** 2 * tail / t)
    assert truncation_fraction(b, T, tmax) == pytest.approx(want, rel=1e-8)


def test_horizon_and_truncation_error():
    b = parse_basis("power lambda=0; power lambda=1")
    h = x_zero_horizon(b, 1.0)
    assert truncation_fraction(b, 1.0, h) <= 1e-2
    k = muntz_kernel([0, 1])
    short = TimeGrid.build(1.0, dt=1e-2, tail_end=5.0)
    with pytest.raises(TruncationError):
        XZeroPlan.build(k, short, 1.0)


def test_x_zero_variance_oracle():
    """Var(X0_1) for f = e^-s from a quadrature of its covariance terms."""
    phi_int = lambda a, b: np.log(np.tanh(b / 2)) - np.log(np.tanh(a / 2))
    cross = integrate.quad(lambda u: np.exp(-u) * phi_int(u, 1.0), 0, 1)[0]
    quad = 2 * integrate.dblquad(lambda v, u: np.exp(-u - v) * (1 / np.tanh(u) - 1),
                                 0, 1, 0, lambda u: u)[0]
    oracle = 1 - 2 * cross + quad
    assert oracle == pytest.approx(1 - 2 * (1 - np.exp(-1)) ** 2, abs=1e-10)

    b = parse_basis("exp rate=1")
    g = x_zero_grid(b, 1.0, dt=2e-3, eps0=1e-4)
    plan = XZeroPlan.build(goursat_kernel(b), g, 1.0)
    X = x_zero_values(plan, brownian_values(g, RngSpec(5), range(6000)))[:, -1]
    assert abs(X.var(ddof=1) - oracle) < 4 * oracle * np.sqrt(2 / 6000) + 5e-3


def test_x_zero_sample_path(rng):
    k = muntz_kernel([0, 1])
    g = x_zero_grid(k.basis, 1.0, dt=1e-2)
    W = SamplePath(g, brownian_values(g, rng, [0])[0], "brownian")
    X = x_zero(k, W, 1.0)
    assert X.grid.end == 1.0 and X.values.shape == (len(X.grid),)


def test_recovery_of_deterministic_combination():
    b = parse_basis("power lambda=0; power lambda=1")
    g = TimeGrid.build(4.0, dt=1e-3)
    y = np.array([1.0, -2.0])
    X = b.primitive(g.times) @ y
    hist, times = recover_values(b, g, X, 4.0)
    np.testing.assert_allclose(hist[2], y, atol=1e-4)
    np.testing.assert_allclose(times[-1], 4.0)


def test_iterate_edge_cases(grid, rng):
    k = constant_kernel()
    plan = TransformPlan.build(k, grid)
    Bv = brownian_values(grid, rng, [0])
    np.testing.assert_array_equal(iterate_values(plan, Bv, 0), Bv)
    np.testing.assert_allclose(iterate_values(plan, Bv, 1), transform_values(plan, Bv)[0])
    np.testing.assert_allclose(laguerre_values(0, grid, Bv), Bv, atol=1e-12)
    assert np.max(np.abs(iterate_values(plan, Bv, 3) - laguerre_values(3, grid, Bv))) < 5e-3


def test_zero_driver_gives_zero_x0():
    k = muntz_kernel([0, 1])
    g = x_zero_grid(k.basis, 1.0, dt=1e-2)
    plan = XZeroPlan.build(k, g, 1.0)
    assert np.all(x_zero_values(plan, np.zeros(len(g))) == 0.0)


def test_x_zero_is_brownian_for_muntz():
    k = muntz_kernel([0, 1])
    g = x_zero_grid(k.basis, 1.0, dt=5e-3, eps0=1e-5)
    plan = XZeroPlan.build(k, g, 1.0)
    X = x_zero_values(plan, brownian_values(g, RngSpec(21), range(6000)))[:, -1]
    assert abs(X.var(ddof=1) - 1.0) < 4 * np.sqrt(2 / 6000) + 0.02


def test_recover_drift_with_constant_basis():
    # alpha_T I_T(B + c t) = B_T / T + c for f = 1
    fb = parse_basis("const")
    g = TimeGrid.build(4.0, dt=1e-2)
    Bv = brownian_values(g, RngSpec(2), range(3000))
    c = 3.0
    y = recover_values(fb, g, Bv + c * g.times, 4.0)[0][:, 2, 0]
    np.testing.assert_allclose(y, Bv[:, -1] / 4.0 + c, atol=1e-12)
    assert abs(y.mean() - c) < 4 * y.std() / np.sqrt(y.size)
    y0 = recover_values(fb, g, Bv, 4.0)[0][:, 2, 0]
    assert abs(y0.mean()) < 4 * y0.std() / np.sqrt(y0.size)


def test_ito_integral_of_time():
    from goursat.paths import SamplePath, ito_integral
    fb = parse_basis("power lambda=0; power lambda=1")
    g = TimeGrid.build(1.0, dt=1e-3)
    I = ito_integral(fb, SamplePath(g, g.times, "deterministic"))
    np.testing.assert_allclose(I[-1], [1.0, 0.5], atol=1e-9)
    Ib = ito_integral(fb, SamplePath(g, brownian_values(g, RngSpec(1), [0])[0], "brownian"))
    assert Ib.shape == (len(g), 2)
