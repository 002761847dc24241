import numpy as np
import pytest
from numpy.polynomial.hermite_e import hermegauss
from scipy import integrate, stats

from goursat.basis import FunctionBasis, gramian, parse_basis
from goursat.errors import ConfigError
from goursat.harmonic import (EndpointLaw, harmonic_h, log_h, martingale_check, tilted_sampler,
                              tilted_values)
from goursat.paths import RngSpec, TimeGrid

CONST = FunctionBasis.powers([0])
PAIR = FunctionBasis.powers([0, 1])


def test_point_mass_closed_form():
    assert harmonic_h(CONST, EndpointLaw.point(0.5), 1.0, [0.2]) == pytest.approx(np.exp(0.1 - 0.125))
    y = np.array([1.0, -2.0])
    x = np.array([0.3, 0.1])
    m = gramian(PAIR, 2.0)
    assert log_h(PAIR, EndpointLaw.point(y), 2.0, x) == pytest.approx(y @ x - 0.5 * y @ m @ y)


def test_discrete_is_weighted_sum():
    law = EndpointLaw("discrete", points=[[0.5], [-1.0], [2.0]], weights=[0.2, 0.5, 0.3])
    x = np.array([[0.1], [0.7]])
    want = sum(w * harmonic_h(CONST, EndpointLaw.point(p), 0.5, x)
               for p, w in zip([0.5, -1.0, 2.0], [0.2, 0.5, 0.3]))
    np.testing.assert_allclose(harmonic_h(CONST, law, 0.5, x), want, rtol=1e-12)


@pytest.mark.parametrize("mu, sd, t, x", [(0.0, 1.0, 1.0, 0.3), (0.5, 0.3, 2.0, -1.0),
                                          (-1.0, 2.0, 0.5, 2.0)])
def test_gaussian_1d_against_quadrature(mu, sd, t, x):
    want = integrate.quad(lambda y: np.exp(y * x - 0.5 * t * y * y) * stats.norm.pdf(y, mu, sd),
                          -np.inf, np.inf, epsabs=1e-13)[0]
    law = EndpointLaw.gaussian([[sd * sd]], mean=[mu])
    assert harmonic_h(CONST, law, t, [x]) == pytest.approx(want, rel=1e-9)


def test_gaussian_2d_against_hermite_rule():
    z, w = hermegauss(40)
    w = w / w.sum()
    C = np.array([[1.0, 0.3], [0.3, 0.5]])
    mu = np.array([0.2, -0.1])
    L = np.linalg.cholesky(C)
    pts = mu + np.stack(np.meshgrid(z, z, indexing="ij"), -1).reshape(-1, 2) @ L.T
    wts = np.outer(w, w).ravel()
    x = np.array([0.4, -0.2])
    m = gramian(PAIR, 1.0)
    want = np.sum(wts * np.exp(pts @ x - 0.5 * np.einsum("ki,ij,kj->k", pts, m, pts)))
    assert harmonic_h(PAIR, EndpointLaw.gaussian(C, mu), 1.0, x) == pytest.approx(want, rel=1e-10)


def test_degenerate_gaussian_reduces_to_a_line():
    v = np.array([1.0, 1.0])
    x = np.array([0.3, 0.2])
    m = gramian(PAIR, 1.0)
    f = lambda s: np.exp(s * v @ x - 0.5 * s * s * v @ m @ v) * stats.norm.pdf(s)
    want = integrate.quad(f, -np.inf, np.inf, epsabs=1e-13)[0]
    law = EndpointLaw.gaussian(np.outer(v, v))
    assert law.factor.shape == (2, 1)
    assert harmonic_h(PAIR, law, 1.0, x) == pytest.approx(want, rel=1e-9)


def test_log_space_is_stable_for_large_arguments():
    law = EndpointLaw("discrete", points=[[30.0], [40.0]], weights=[0.5, 0.5])
    assert np.isfinite(log_h(CONST, law, 1e-3, [100.0]))


def test_law_validation():
    with pytest.raises(ConfigError):
        EndpointLaw("discrete", points=[[0.0], [1.0]], weights=[0.5, 0.6])
    with pytest.raises(ConfigError):
        EndpointLaw.gaussian([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ConfigError):
        EndpointLaw.gaussian([[-1.0]])
    with pytest.raises(ConfigError):
        log_h(PAIR, EndpointLaw.point(1.0), 1.0, [0.0, 0.0])


def test_martingale_check_small():
    e = martingale_check(CONST, EndpointLaw.point(0.5), 0.5, 4000, RngSpec(4),
                         grid=TimeGrid.build(0.5, dt=5e-3))
    assert e.within(1.0)


def test_martingale_needs_zero_alpha_infinity():
    with pytest.raises(ConfigError):
        martingale_check(parse_basis("exp rate=1"), EndpointLaw.point(0.5), 1.0, 10, RngSpec(1))


def test_tilted_measure_mean():
    g = TimeGrid.build(1.0, dt=1e-2)
    law = EndpointLaw("discrete", points=[[1.0], [3.0]], weights=[0.5, 0.5])
    vals, Y = tilted_values(CONST, law, g, RngSpec(8), range(8000))
    # E[B_1 + Y] = E[Y] = 2
    assert abs(vals[:, -1].mean() - 2.0) < 4 * vals[:, -1].std() / np.sqrt(8000)
    assert set(np.unique(Y)) == {1.0, 3.0}
    assert tilted_sampler(CONST, law, g, RngSpec(8)).role == "tilted"
