
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nhkit import InvalidArgumentError, verify_system
from nhkit.problems import QProfile, eigensystem
from nhkit.quad import SampledFunction, lp_norm
from nhkit.transform import CoefficientVector, convolve, forward, inverse, parseval

from conftest import E, band_limited, nonlocal_default, separated

PROBLEMS = [
    lambda r: separated((1.0,), r),
    lambda r: separated((E,), r),
    lambda r: separated((0.5, 2.0), min(r, 4)),
    lambda r: nonlocal_default(r),
    lambda r: nonlocal_default(r, QProfile.cos(0.1, 1)),
]


@pytest.mark.parametrize("make", PROBLEMS)
def test_forward_of_eigenfunctions(make):
    p, idx, g = make(6)
    u, v = eigensystem(p, idx, g)
    for k in (0, 3, len(idx) - 1):
        fh = forward(SampledFunction(g, u[k]), p, idx, "L")
        expect = np.zeros(len(idx))
        expect[k] = 1
        np.testing.assert_allclose(fh.values, expect, atol=1e-8)
        fs = forward(SampledFunction(g, v[k]), p, idx, "Lstar")
        np.testing.assert_allclose(fs.values, expect, atol=1e-8)


def test_forward_constant_periodic():
    p, idx, g = separated((1.0,), 5)
    fh = forward(g.constant(), p, idx)
    np.testing.assert_allclose(fh.values, np.eye(len(idx))[0], atol=1e-14)


def test_inverse_examples():
    p, idx, g = separated((E,), 4)
    u0 = inverse(CoefficientVector.delta(idx, 0), p, g)
    np.testing.assert_allclose(u0.values, np.exp(g.nodes[:, 0]), rtol=1e-14)
    zero = inverse(CoefficientVector(idx, np.zeros(len(idx))), p, g)
    assert np.all(zero.values == 0)


@pytest.mark.parametrize("make", PROBLEMS)
def test_round_trips(make, rng):
    p, idx, g = make(8)
    f, c = band_limited(p, idx, g, rng, radius=idx.radius - 1)
    back = inverse(forward(f, p, idx), p, g)
    assert np.max(np.abs(back.values - f.values)) <= 1e-8 * np.max(np.abs(f.values))
    cv = CoefficientVector(idx, rng.standard_normal(len(idx)) + 0j)
    again = forward(inverse(cv, p, g), p, idx)
    assert np.max(np.abs(again.values - cv.values)) <= 1e-10 * np.max(np.abs(cv.values))


def test_parseval_examples():
    p, idx, g = separated((E,), 4)
    u, _ = eigensystem(p, idx, g)
    u0 = SampledFunction(g, u[idx.position(0)])
    lhs, rhs = parseval(u0, u0, p, idx)
    assert abs(lhs - 3.1945280494653251136) < 1e-12 and abs(rhs - lhs) < 1e-12
    # (u_1, u_2) = int e^{2x} e^{-2 pi i x} dx, from mpmath; both sides agree with it
    u1 = SampledFunction(g, u[idx.position(1)])
    u2 = SampledFunction(g, u[idx.position(2)])
    lhs, rhs = parseval(u1, u2, p, idx)
    expect = 0.29389552108678099588 + 0.92330000996917534324j
    assert abs(lhs - expect) < 1e-12 and abs(rhs - expect) < 1e-8
    p1, idx1, g1 = separated((1.0,), 3)
    lhs, rhs = parseval(g1.constant(), g1.constant(), p1, idx1)
    assert abs(lhs - 1) < 1e-14 and abs(rhs - 1) < 1e-14


@pytest.mark.parametrize("make", PROBLEMS)
def test_parseval_on_span(make, rng):
    p, idx, g = make(6)
    f, _ = band_limited(p, idx, g, rng)
    h, _ = band_limited(p, idx, g, rng)
    lhs, rhs = parseval(f, h, p, idx)
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs))


def test_coefficient_tail():
    p, idx, g = separated((1.0,), 3)
    c = CoefficientVector(idx, np.arange(len(idx), dtype=float))
    assert c.tail() == sum(k**2 for k in range(5, 7))
    assert c[(3,)] == idx.position(3)
    with pytest.raises(InvalidArgumentError):
        forward(g.constant(), p, idx, flavor="bad")


@pytest.mark.parametrize("make", PROBLEMS)
@pytest.mark.parametrize("flavor", ["L", "Lstar"])
def test_convolution_theorem(make, flavor, rng):
    p, idx, g = make(6)
    f, _ = band_limited(p, idx, g, rng)
    h, _ = band_limited(p, idx, g, rng)
    k, _ = band_limited(p, idx, g, rng)
    fh, hh = forward(f, p, idx, flavor), forward(h, p, idx, flavor)
    fg = convolve(f, h, p, idx, flavor=flavor)
    scale = np.max(np.abs(fh.values * hh.values))
    assert np.max(np.abs(forward(fg, p, idx, flavor).values - fh.values * hh.values)) <= 1e-8 * scale
    gf = convolve(h, f, p, idx, flavor=flavor)
    assert np.max(np.abs(fg.values - gf.values)) <= 1e-10 * np.max(np.abs(fg.values))
    left = convolve(fg, k, p, idx, flavor=flavor)
    right = convolve(f, convolve(h, k, p, idx, flavor=flavor), p, idx, flavor=flavor)
    assert np.max(np.abs(left.values - right.values)) <= 1e-8 * np.max(np.abs(left.values))


def test_convolution_examples():
    p, idx, g = separated((E,), 4)
    u, _ = eigensystem(p, idx, g)
    u1 = SampledFunction(g, u[idx.position(1)])
    u2 = SampledFunction(g, u[idx.position(2)])
    assert np.max(np.abs(convolve(u1, u2, p, idx).values)) < 1e-12
    # g with ghat = 1 on the truncation acts as the projection
    one = inverse(CoefficientVector(idx, np.ones(len(idx))), p, g)
    f = g.sample(lambda x: np.cos(3 * x) + x**2)
    proj = inverse(forward(f, p, idx), p, g)
    np.testing.assert_allclose(convolve(f, one, p, idx).values, proj.values, atol=1e-10)


@pytest.mark.parametrize("make", PROBLEMS[:4])
def test_l1_convolution_bound(make, rng):
    p, idx, g = make(5)
    rep = verify_system(p, idx, g)
    u, _ = eigensystem(p, idx, g)
    c = rep.ell**2 * max(lp_norm(SampledFunction(g, row), 1) for row in u)
    for _ in range(100):
        f, _ = band_limited(p, idx, g, rng)
        h, _ = band_limited(p, idx, g, rng)
        lhs = lp_norm(convolve(f, h, p, idx), 1)
        assert lhs <= c * lp_norm(f, 2) * lp_norm(h, 2) * (1 + 1e-10)


def test_forward_cauchy_schwarz(rng):
    p, idx, g = separated((0.3,), 6)
    _, v = eigensystem(p, idx, g)
    f = SampledFunction(g, rng.standard_normal(g.size))
    fh = forward(f, p, idx)
    vn = np.sqrt(np.abs(v) ** 2 @ g.weights)
    assert np.all(np.abs(fh.values) <= lp_norm(f, 2) * vn * (1 + 1e-12))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 4.0), st.integers(0, 2**31))
def test_parseval_property(h, seed):
    p, idx, g = separated((h,), 5)
    r = np.random.default_rng(seed)
    f, _ = band_limited(p, idx, g, r)
    k, _ = band_limited(p, idx, g, r)
    lhs, rhs = parseval(f, k, p, idx)
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs))
