import math

import numpy as np
import pytest

from nhkit import IndexSet, SeparatedProblem, NonlocalProblem, QProfile, grid_for

E = math.e


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def band_limited(problem, indices, grid, rng, radius=None):
    """Random combination of u_xi with |xi|_inf <= radius, sampled on grid."""
    from nhkit.problems import eigensystem
    from nhkit.quad import SampledFunction

    u, _ = eigensystem(problem, indices, grid)
    radius = indices.radius if radius is None else radius
    mask = indices.shells <= radius
    c = np.where(mask, rng.standard_normal(len(indices)) + 1j * rng.standard_normal(len(indices)), 0)
    return SampledFunction(grid, c @ u), c


def separated(h, radius):
    p = SeparatedProblem(tuple(h))
    return p, IndexSet(p.dimension, radius), grid_for(p.dimension, radius)


def nonlocal_default(radius, q=None):
    q = QProfile.zero() if q is None else q
    p = NonlocalProblem.normalized(-1.0, q)
    return p, IndexSet(1, radius), grid_for(1, radius)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
