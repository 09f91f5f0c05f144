import numpy as np
import pytest

from nhkit.quad import build_grid
from nhkit.stencils import differential_operator, differentiation_matrix, fd_grid, fornberg_weights, laplacian


def test_fornberg_uniform_centred():
    c = fornberg_weights(0.0, [-2, -1, 0, 1, 2], 2)
    np.testing.assert_allclose(c[:, 0], [0, 0, 1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(c[:, 1], [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12], atol=1e-14)
    np.testing.assert_allclose(c[:, 2], [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12], atol=1e-14)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_differentiation_exact_on_polynomials(order):
    x = build_grid(1, 6, 3).axis_nodes
    d = differentiation_matrix(x, order, width=6)
    poly = np.polynomial.Polynomial([0.3, -1.0, 2.0, 0.5, -0.7, 0.2])
    np.testing.assert_allclose(d @ poly(x), poly.deriv(order)(x), atol=1e-8)


def test_width_too_small():
    with pytest.raises(ValueError):
        differentiation_matrix(np.linspace(0, 1, 10), 3, width=3)


def test_tensor_laplacian_on_polynomial():
    g = build_grid(2, 5, 2)
    x, y = g.coords()
    f = g.sample(lambda x, y: x**3 * y**2 + y**4)
    out = laplacian(g, width=5)(f)
    np.testing.assert_allclose(out.values, 6 * x * y**2 + 2 * x**3 + 12 * y**2, atol=1e-8)


def test_mixed_operator():
    g = build_grid(2, 6, 2)
    x, y = g.coords()
    op = differential_operator(g, {(1, 1): 2.0, (0, 0): 1j})
    f = g.sample(lambda x, y: x**2 * y**3)
    np.testing.assert_allclose(op(f).values, 2 * 6 * x * y**2 + 1j * x**2 * y**3, atol=1e-9)
    with pytest.raises(ValueError):
        differential_operator(g, {(1,): 1.0})


def test_fd_grid_size():
    assert fd_grid(1, 4).panels_per_dim == 16
    assert fd_grid(2, 0).panels_per_dim == 4
