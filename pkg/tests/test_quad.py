import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nhkit import GridMismatchError, InvalidArgumentError
from nhkit.quad import SampledFunction, build_grid, grid_for, inner_product, lp_norm


def test_two_point_rule():
    g = build_grid(1, 2, 1)
    np.testing.assert_allclose(np.sort(g.nodes[:, 0]), [(3 - math.sqrt(3)) / 6, (3 + math.sqrt(3)) / 6], atol=1e-15)
    np.testing.assert_allclose(g.weights, [0.5, 0.5], atol=1e-15)


def test_tensor_two_by_two():
    g = build_grid(2, 2, 1)
    assert g.size == 4
    np.testing.assert_allclose(g.weights, 0.25, atol=1e-15)


@pytest.mark.parametrize("dim,nodes,panels", [(1, 8, 4), (2, 6, 3), (3, 4, 2), (1, 64, 7)])
def test_grid_invariants(dim, nodes, panels):
    g = build_grid(dim, nodes, panels)
    assert g.size == (nodes * panels) ** dim
    assert abs(g.weights.sum() - 1.0) < 1e-13
    assert np.all(g.weights > 0)
    assert np.all((g.nodes > 0) & (g.nodes < 1))


@pytest.mark.parametrize("kwargs,field", [
    (dict(dimension=0, nodes_per_dim=4, panels_per_dim=1), "dimension"),
    (dict(dimension=4, nodes_per_dim=4, panels_per_dim=1), "dimension"),
    (dict(dimension=1, nodes_per_dim=1, panels_per_dim=1), "nodes_per_dim"),
    (dict(dimension=1, nodes_per_dim=65, panels_per_dim=1), "nodes_per_dim"),
    (dict(dimension=1, nodes_per_dim=4, panels_per_dim=0), "panels_per_dim"),
])
def test_build_grid_rejects(kwargs, field):
    with pytest.raises(InvalidArgumentError) as info:
        build_grid(**kwargs)
    assert info.value.field == field


def test_inner_product_examples():
    g = build_grid(1, 8, 4)
    one = g.constant()
    assert abs(inner_product(one, one) - 1) < 1e-14
    mode = g.sample(lambda x: np.exp(2j * np.pi * x))
    assert abs(inner_product(mode, one)) < 1e-12
    ex = g.sample(np.exp)
    # (e^2 - 1)/2 from mpmath
    assert abs(inner_product(ex, ex) - 3.1945280494653251136) < 1e-13


def test_inner_product_grid_mismatch():
    f = build_grid(1, 8, 4).constant()
    g = build_grid(1, 8, 2).constant()
    with pytest.raises(GridMismatchError):
        inner_product(f, g)


def test_lp_norm_examples():
    g = build_grid(1, 8, 4)
    for p in (1, 1.5, 2, 7, math.inf, "inf"):
        assert abs(lp_norm(g.constant(), p) - 1) < 1e-13
    assert abs(lp_norm(g.sample(lambda x: np.exp(2j * np.pi * x)), 2) - 1) < 1e-13
    assert abs(lp_norm(g.sample(np.exp), 1) - 1.7182818284590452354) < 1e-13
    with pytest.raises(InvalidArgumentError):
        lp_norm(g.constant(), 0.5)


def test_polynomial_exactness():
    g = build_grid(2, 5, 1)
    x, y = g.coords()
    f = SampledFunction(g, x**9 * y**4)
    exact = 1 / 10 * 1 / 5
    assert abs(inner_product(f, g.constant()) - exact) < 1e-13 * exact


def test_refinement_is_monotone():
    f = lambda x: np.exp(3 * x) * np.cos(7 * x)
    vals = []
    for panels in (1, 2, 4, 8):
        g = build_grid(1, 4, panels)
        vals.append(inner_product(g.sample(f), g.constant()))
    changes = np.abs(np.diff(vals))
    assert np.all(changes[1:] < changes[:-1])


def test_grid_for_resolves_radius():
    for radius in (2, 8, 16, 32):
        g = grid_for(1, radius)
        k = 2 * radius
        f = g.sample(lambda x: np.exp((2 + 2j * np.pi * k) * x))
        exact = (np.exp(2) - 1) / (2 + 2j * np.pi * k)
        assert abs(inner_product(f, g.constant()) - exact) < 1e-14


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1, 8))
def test_cauchy_schwarz_and_homogeneity(seed, p):
    r = np.random.default_rng(seed)
    g = build_grid(2, 4, 2)
    f = SampledFunction(g, r.standard_normal(g.size) + 1j * r.standard_normal(g.size))
    h = SampledFunction(g, r.standard_normal(g.size) + 1j * r.standard_normal(g.size))
    assert abs(inner_product(f, h)) <= lp_norm(f, 2) * lp_norm(h, 2) * (1 + 1e-12)
    assert abs(inner_product(f, h) - np.conj(inner_product(h, f))) < 1e-12
    c = complex(r.standard_normal(), r.standard_normal())
    assert abs(lp_norm(f * c, p) - abs(c) * lp_norm(f, p)) < 1e-12 * lp_norm(f, p) * abs(c)
