import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ktlab.analytic import (
    BoundaryGrid,
    cayley,
    disk_grid,
    inner_outer_factor,
    outer_from_modulus,
    sample_boundary,
    v_inverse,
    v_transform,
    winding_number,
)
from ktlab.expr import EvaluationError, parse_expr
from ktlab.quadrature import line_integral


def test_boundary_grid_validation():
    with pytest.raises(ValueError):
        BoundaryGrid(np.ones(100))
    g = sample_boundary(lambda z: z**3, 64)
    c = g.fourier()
    assert abs(c[3] - 1) < 1e-14 and np.sum(np.abs(c)) == pytest.approx(1)
    with pytest.raises(EvaluationError):
        sample_boundary(parse_expr("1/(1-z)"), 64)


@pytest.mark.parametrize("scheme", ["polar-product", "quasi-uniform"])
@pytest.mark.parametrize("alpha", [0.0, 1.5])
def test_disk_grid_mass_and_moments(scheme, alpha):
    g = disk_grid(32, 64, scheme, alpha)
    assert g.w.sum() == pytest.approx(1 / (1 + alpha), abs=1e-12)
    if scheme == "polar-product":
        from ktlab.quadrature import bergman_moments

        m = bergman_moments(10, alpha)
        got = [np.sum(g.w * np.abs(g.z) ** (2 * k)) for k in range(10)]
        np.testing.assert_allclose(got, m, rtol=1e-12)


positive = st.lists(st.floats(0.1, 10.0), min_size=64, max_size=64)


@given(positive)
def test_outer_reproduces_modulus_at_nodes(vals):
    w = np.asarray(vals)
    F = outer_from_modulus(w)
    np.testing.assert_allclose(np.abs(F.boundary_values()), w, rtol=1e-12)
    # zero free inside and positive at the origin
    assert winding_number(F, 0.99) == 0
    assert abs(np.angle(F(0.0))) < 1e-12


def test_outer_of_smooth_modulus_is_exact():
    # |1 + z/2| on the circle; the outer function is 1 + z/2 itself
    N = 256
    th = 2 * np.pi * np.arange(N) / N
    F = outer_from_modulus(np.abs(1 + np.exp(1j * th) / 2))
    z = np.array([0, 0.5j, -0.7, 0.3 + 0.3j])
    np.testing.assert_allclose(F(z), 1 + z / 2, rtol=1e-12)
    np.testing.assert_allclose(F.series(4), [1, 0.5, 0, 0], atol=1e-12)
    np.testing.assert_allclose(F.power(2)(z), (1 + z / 2) ** 2, rtol=1e-12)


def test_outer_rejects_zero_modulus():
    with pytest.raises(ValueError):
        outer_from_modulus(np.r_[np.ones(63), 0.0])


def test_inner_outer_factor():
    h = parse_expr("z^2 * blaschke(0.4) * (3 + z)")
    res = inner_outer_factor(h, 1024)
    assert res.residual < 1e-10
    z = np.array([0.1, -0.2j])
    np.testing.assert_allclose(res.outer(z), 3 + z, rtol=1e-10)
    assert winding_number(h, 0.99) == 3


def test_cayley_involution_and_mapping():
    rng = np.random.default_rng(0)
    z = np.sqrt(rng.random(1000)) * np.exp(2j * np.pi * rng.random(1000))
    s = cayley(z)
    assert np.all(s.real > 0)
    np.testing.assert_allclose(cayley(s), z, atol=1e-13)
    with pytest.raises(ZeroDivisionError):
        cayley(-1.0)


@given(st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False))
def test_v_is_isometric_on_kernels(lam):
    if abs(lam) >= 0.95:
        return
    k = lambda z: np.sqrt(1 - abs(lam) ** 2) / (1 - np.conj(lam) * z)
    w = cayley(lam)
    norm2 = line_integral(lambda s: np.abs(v_transform(k, s)) ** 2, center=w.imag, scale=w.real)
    assert norm2 == pytest.approx(1.0, rel=1e-9)
    z = np.array([0.2, -0.3j])
    np.testing.assert_allclose(v_inverse(lambda s: v_transform(k, s), z), k(z), rtol=1e-12)
