import numpy as np
import pytest
from scipy import integrate

from goursat import basis as B
from goursat.basis import BasisFunction, FunctionBasis
from goursat.errors import ConfigError, NumericalError


def quad_gramian(fb, t):
    n = fb.n
    m = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            m[i, j] = integrate.quad(lambda u: fb(np.array(u))[i] * fb(np.array(u))[j], 0, t,
                                     epsabs=1e-14, epsrel=1e-13)[0]
    return m


@pytest.mark.parametrize("spec", ["power lambda=0; power lambda=1",
                                  "const; exp rate=1",
                                  "power lambda=0.5; exp rate=2; power lambda=2"])
@pytest.mark.parametrize("t", [0.3, 1.0, 4.0])
def test_gramian_matches_quadrature(spec, t):
    fb = B.parse_basis(spec)
    np.testing.assert_allclose(B.gramian(fb, t), quad_gramian(fb, t), rtol=1e-10, atol=1e-13)


def test_alpha_powers_closed_form():
    a = B.alpha(FunctionBasis.powers([0, 1]), 1.0)
    np.testing.assert_allclose(a, [[4.0, -6.0], [-6.0, 12.0]], rtol=1e-12)


def test_alpha_scales_for_powers():
    # m_t = D m_1 D with D = diag(t^(lambda + 1/2))
    fb = FunctionBasis.powers([0, 1, 2])
    t = 7.0
    d = t ** -(fb.lambdas + 0.5)
    np.testing.assert_allclose(B.alpha(fb, t), d[:, None] * B.alpha(fb, 1.0) * d[None, :],
                               rtol=1e-9)


def test_phi_exponential():
    fb = B.parse_basis("exp rate=1")
    t = np.array([0.2, 1.0, 3.0])
    np.testing.assert_allclose(B.phi(fb, t)[:, 0], 1.0 / np.sinh(t), rtol=1e-12)


def test_alpha_infinity_cases():
    assert B.alpha_infinity(FunctionBasis.powers([0, 1])).is_zero
    a = B.alpha_infinity(B.parse_basis("exp rate=1.5"))
    np.testing.assert_allclose(a.matrix, [[3.0]], rtol=1e-12)
    mixed = B.alpha_infinity(B.parse_basis("const; exp rate=1"))
    assert mixed.zero_rows.tolist() == [True, False]
    assert np.all(mixed.matrix[0] == 0.0) and np.all(mixed.matrix[:, 0] == 0.0)


def test_alpha_infinity_mixed_against_schur_limit():
    # with f = (1, e^-s): alpha_t[1,1] = 1 / (m22 - m12^2 / m11) -> 1 / (1/2) = 2
    mixed = B.alpha_infinity(B.parse_basis("const; exp rate=1"))
    assert abs(mixed.matrix[1, 1] - 2.0) < 1e-6


@pytest.mark.parametrize("spec", ["power lambda=0; power lambda=1", "exp rate=1"])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_alpha_identity(spec, t):
    fb = B.parse_basis(spec)
    assert np.max(np.abs(B.verify_alpha_identity(fb, t, 10.0))) < 1e-9


def test_phi_tail_against_quadrature():
    fb = B.parse_basis("power lambda=0; power lambda=1")
    T = 3.0
    want = integrate.quad_vec(lambda u: np.outer(B.phi(fb, u), B.phi(fb, u)), T, np.inf)[0]
    np.testing.assert_allclose(B.phi_tail(fb, T), want, rtol=1e-8)


def test_parse_errors():
    for bad in ["", "power", "power lambda=-1", "exp rate=0", "wibble x=1", "const 3",
                "power lambda=abc"]:
        with pytest.raises(ConfigError):
            B.parse_basis(bad)


def test_table_basis(tmp_path):
    p = tmp_path / "f.txt"
    np.savetxt(p, np.column_stack([[0.5, 1.0, 2.0], [1.0, 2.0, 0.5]]))
    fb = B.load_basis(f"table file={p}")
    assert fb(np.array(0.1))[0] == 1.0
    assert fb(np.array(3.0))[0] == 0.0
    assert B.parse_basis(f"table file={p.name}", base_dir=tmp_path).n == 1


def test_near_duplicate_basis_is_a_numerical_error():
    fb = FunctionBasis.powers([0.0, 1e-9])
    with pytest.raises(NumericalError):
        B.alpha(fb, 1.0)


def test_orthonormal_shifted_legendre():
    q = B.orthonormalize(FunctionBasis.powers([0, 1]), 1.0)
    u = np.linspace(0.05, 1.0, 7)
    np.testing.assert_allclose(q(u)[:, 0], 1.0, atol=1e-12)
    np.testing.assert_allclose(q(u)[:, 1], np.sqrt(3) * (2 * u - 1), atol=1e-12)
    single = B.orthonormalize(FunctionBasis.powers([0]), 4.0)
    np.testing.assert_allclose(single.b, [[0.5]])


@pytest.mark.parametrize("spec", ["power lambda=0; power lambda=1; power lambda=2",
                                  "const; exp rate=1; exp rate=3; power lambda=0.5"])
def test_orthonormal_system_and_alpha(spec):
    fb = B.parse_basis(spec)
    t = 1.5
    q = B.orthonormalize(fb, t)
    assert np.allclose(q.b, np.triu(q.b)) and np.all(np.diag(q.b) > 0)
    np.testing.assert_allclose(q.b @ q.b.T, B.alpha(fb, t), rtol=1e-8, atol=1e-8)
    gram = integrate.quad_vec(lambda u: np.outer(q(u), q(u)), 0, t, epsabs=1e-12)[0]
    np.testing.assert_allclose(gram, np.eye(fb.n), atol=1e-8)


def test_phi_squared_from_b_derivative():
    # phi_i^2 = -2 (b_t' b_t^T)_ii, with b_t' by central differences
    fb = B.parse_basis("power lambda=0; exp rate=1")
    t, h = 0.8, 1e-5
    db = (B.orthonormalize(fb, t + h).b - B.orthonormalize(fb, t - h).b) / (2 * h)
    b = B.orthonormalize(fb, t).b
    np.testing.assert_allclose(-2 * np.diag(db @ b.T), B.phi(fb, t) ** 2, rtol=1e-5)


@pytest.mark.parametrize("spec", ["power lambda=0; power lambda=1", "const; exp rate=2"])
def test_alpha_derivative_and_monotonicity(spec):
    fb = B.parse_basis(spec)
    t, h = 0.9, 1e-5
    da = (B.alpha(fb, t + h) - B.alpha(fb, t - h)) / (2 * h)
    p = B.phi(fb, t)
    np.testing.assert_allclose(da, -np.outer(p, p), rtol=1e-5, atol=1e-8)
    diags = np.array([np.diag(B.alpha(fb, s)) for s in (0.5, 1.0, 2.0, 4.0)])
    assert np.all(np.diff(diags, axis=0) < 0)
    m = B.gramian(fb, t)
    assert np.all(np.diag(B.alpha(fb, t)) >= 1 / np.diag(m))


def test_gramian_state():
    fb = B.parse_basis("power lambda=0; power lambda=1")
    s = B.gramian_state(fb, 2.0)
    np.testing.assert_allclose(s.m @ s.alpha, np.eye(2), atol=1e-12)


def test_tail_examples():
    # int_1^inf phi phi^T for f = (1, s) reproduces alpha_1 entries: 4 and -6
    tail = B.phi_tail(FunctionBasis.powers([0, 1]), 1.0)
    np.testing.assert_allclose(tail[0], [4.0, -6.0], rtol=1e-12)
