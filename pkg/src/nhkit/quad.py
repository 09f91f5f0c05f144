"""Composite Gauss-Legendre tensor grids on the unit cube.

Every function in nhkit is carried as samples on one of these grids; the
discrete L^2 inner product and L^p norms below are the only integration
rules used downstream.
"""
from dataclasses import dataclass
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import GridMismatchError, InvalidArgumentError

__all__ = [
    "Grid",
    "SampledFunction",
    "build_grid",
    "grid_for",
    "inner_product",
    "lp_norm",
]

MAX_DIMENSION = 3
MAX_NODES_PER_DIM = 64


def _composite_rule(nodes_per_dim, panels_per_dim):
    t, w = leggauss(nodes_per_dim)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    x = np.concatenate([(t + k) / panels_per_dim for k in range(panels_per_dim)])
    wx = np.tile(w / panels_per_dim, panels_per_dim)
    return x, wx


@dataclass(frozen=True, eq=False)
class Grid:
    """Tensor-product quadrature on [0, 1]^n.

    Nodes are stored row-wise in ``nodes`` (shape ``(size, dimension)``) in
    C order over the axes, i.e. the last coordinate varies fastest.  Two
    grids compare equal when they were built from the same parameters.
    """

    dimension: int
    nodes_per_dim: int
    panels_per_dim: int
    axis_nodes: np.ndarray
    axis_weights: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self):
        return self.weights.shape[0]

    @property
    def shape(self):
        """Shape of the node array when viewed as an n-dimensional tensor."""
        return (self.axis_nodes.shape[0],) * self.dimension

    def coords(self):
        """Tuple of coordinate arrays, one per axis, each of length ``size``."""
        return tuple(self.nodes[:, k] for k in range(self.dimension))

    def sample(self, func):
        """Evaluate ``func(*coords)`` at the nodes and wrap it as a SampledFunction."""
        values = np.asarray(func(*self.coords()), dtype=complex)
        if values.ndim == 0:
            values = np.full(self.size, complex(values))
        return SampledFunction(self, np.broadcast_to(values, (self.size,)).copy())

    def constant(self, value=1.0):
        return SampledFunction(self, np.full(self.size, value, dtype=complex))

    def _key(self):
        return (self.dimension, self.nodes_per_dim, self.panels_per_dim)

    def __eq__(self, other):
        return isinstance(other, Grid) and self._key() == other._key()

    def __hash__(self):
        return hash(("Grid",) + self._key())

    def __repr__(self):
        return "Grid(dimension={}, nodes_per_dim={}, panels_per_dim={}, size={})".format(
            self.dimension, self.nodes_per_dim, self.panels_per_dim, self.size
        )


def build_grid(dimension, nodes_per_dim, panels_per_dim):
    """Build the composite Gauss-Legendre tensor grid on [0, 1]^dimension.

    Parameters
    ----------
    dimension : int
        Spatial dimension, 1 to 3.
    nodes_per_dim : int
        Gauss points per panel, 2 to 64.
    panels_per_dim : int
        Number of equal panels along each axis.

    Returns
    -------
    Grid
    """
    for name, value in (
        ("dimension", dimension),
        ("nodes_per_dim", nodes_per_dim),
        ("panels_per_dim", panels_per_dim),
    ):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise InvalidArgumentError(name, f"must be an integer, got {value!r}")
    if not 1 <= dimension <= MAX_DIMENSION:
        raise InvalidArgumentError("dimension", f"must be in [1, {MAX_DIMENSION}], got {dimension}")
    if not 2 <= nodes_per_dim <= MAX_NODES_PER_DIM:
        raise InvalidArgumentError(
            "nodes_per_dim", f"must be in [2, {MAX_NODES_PER_DIM}], got {nodes_per_dim}"
        )
    if panels_per_dim < 1:
        raise InvalidArgumentError("panels_per_dim", f"must be >= 1, got {panels_per_dim}")

    x, w = _composite_rule(int(nodes_per_dim), int(panels_per_dim))
    mesh = np.meshgrid(*([x] * dimension), indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=1)
    wmesh = np.meshgrid(*([w] * dimension), indexing="ij")
    weights = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
    for arr in (x, w, nodes, weights):
        arr.setflags(write=False)
    return Grid(int(dimension), int(nodes_per_dim), int(panels_per_dim), x, w, nodes, weights)


def grid_for(dimension, radius, nodes_per_dim=16):
    """Smallest default grid that integrates products u_xi * conj(v_eta) for |xi|, |eta| <= radius.

    Such products oscillate with frequency up to ``2 * radius`` per axis;
    with 16 points per panel, one panel per three wavelengths keeps the
    quadrature error at the 1e-14 level.
    """
    panels = max(1, math.ceil((2 * radius + 2) / 3))
    return build_grid(dimension, nodes_per_dim, panels)


class SampledFunction:
    """Node samples of a complex function on a Grid."""

    __slots__ = ("grid", "values")

    def __init__(self, grid, values):
        values = np.asarray(values, dtype=complex)
        if values.shape != (grid.size,):
            raise InvalidArgumentError(
                "values", f"expected {grid.size} samples, got shape {values.shape}"
            )
        self.grid = grid
        self.values = values

    def _other(self, other):
        if isinstance(other, SampledFunction):
            _check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return SampledFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SampledFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return SampledFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return SampledFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return SampledFunction(self.grid, self.values / self._other(other))

    def __neg__(self):
        return SampledFunction(self.grid, -self.values)

    def conj(self):
        return SampledFunction(self.grid, self.values.conj())

    def __repr__(self):
        return f"SampledFunction({self.grid!r})"


def _check_same_grid(f, g):
    if f.grid != g.grid:
        raise GridMismatchError(f"functions live on different grids: {f.grid!r} vs {g.grid!r}")


def inner_product(f, g):
    """Discrete L^2 inner product sum_i f(x_i) conj(g(x_i)) w_i."""
    _check_same_grid(f, g)
    return complex(np.dot(f.grid.weights * f.values, g.values.conj()))


def lp_norm(f, p):
    """Discrete L^p norm; ``p`` may be ``math.inf`` (or the string ``"inf"``) for the node maximum."""
    if isinstance(p, str):
        if p.lower() not in ("inf", "infinity"):
            raise InvalidArgumentError("p", f"unknown flag {p!r}")
        p = math.inf
    if not p >= 1:
        raise InvalidArgumentError("p", f"must be >= 1, got {p}")
    a = np.abs(f.values)
    if math.isinf(p):
        return float(a.max())
    if p == 2:
        return float(math.sqrt(np.dot(f.grid.weights, a * a)))
    scale = a.max()
    if scale == 0.0:
        return 0.0
    # rescale so large p cannot overflow
    return float(scale * np.dot(f.grid.weights, (a / scale) ** p) ** (1.0 / p))
