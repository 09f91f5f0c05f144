"""L-Fourier analysis over a truncated index set.

``forward(f, flavor="L")`` gives f^(xi) = (f, v_xi) and ``flavor="Lstar"``
gives f^_*(xi) = (f, u_xi).  ``inverse`` sums against u_xi (resp. v_xi).
All series are finite; ``CoefficientVector.tail()`` exposes the energy in
the outermost shell so callers can judge truncation.
"""
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, InvalidArgumentError
from .problems import eigensystem
from .quad import SampledFunction, inner_product

__all__ = ["CoefficientVector", "forward", "inverse", "parseval", "convolve"]

FLAVORS = ("L", "Lstar")


def _check_flavor(flavor):
    if flavor not in FLAVORS:
        raise InvalidArgumentError("flavor", f"must be 'L' or 'Lstar', got {flavor!r}")


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    indices: object
    values: np.ndarray
    flavor: str = "L"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (len(self.indices),):
            raise InvalidArgumentError("values", f"expected {len(self.indices)} coefficients, got {values.shape}")
        object.__setattr__(self, "values", values)

    def __getitem__(self, xi):
        return self.values[self.indices.position(xi)]

    def tail(self):
        """sum of |c(xi)|^2 over the outermost shell."""
        mask = self.indices.shell_mask(self.indices.radius)
        return float(np.sum(np.abs(self.values[mask]) ** 2))

    def energy(self):
        return float(np.sum(np.abs(self.values) ** 2))

    @classmethod
    def delta(cls, indices, xi, flavor="L"):
        values = np.zeros(len(indices), dtype=complex)
        values[indices.position(xi)] = 1.0
        return cls(indices, values, flavor)


def forward(f, problem, indices, flavor="L"):
    """Coefficients of ``f`` against conj(v_xi) (flavor L) or conj(u_xi) (flavor Lstar)."""
    _check_flavor(flavor)
    u, v = eigensystem(problem, indices, f.grid)
    dual = v if flavor == "L" else u
    return CoefficientVector(indices, dual.conj() @ (f.grid.weights * f.values), flavor)


def inverse(c, problem, grid, flavor="L"):
    """``sum_xi c(xi) u_xi`` (flavor L) or ``sum_xi c(xi) v_xi`` (flavor Lstar) sampled on ``grid``."""
    _check_flavor(flavor)
    u, v = eigensystem(problem, c.indices, grid)
    basis = u if flavor == "L" else v
    return SampledFunction(grid, c.values @ basis)


def parseval(f, g, problem, indices):
    """Both sides of ``(f, g) = sum_xi f^(xi) conj(g^_*(xi))``.

    The two agree whenever ``f`` lies in the span of the truncated u-system;
    for general inputs the pair is returned for inspection.
    """
    if f.grid != g.grid:
        raise GridMismatchError("parseval needs f and g on one grid")
    lhs = inner_product(f, g)
    fh = forward(f, problem, indices, "L")
    gh = forward(g, problem, indices, "Lstar")
    rhs = complex(np.dot(fh.values, gh.values.conj()))
    return lhs, rhs


def convolve(f, g, problem, indices, grid=None, flavor="L"):
    """L-convolution ``sum f^(xi) g^(xi) u_xi`` (or its L* analogue with v_xi)."""
    if f.grid != g.grid:
        raise GridMismatchError("convolve needs f and g on one grid")
    grid = f.grid if grid is None else grid
    fh = forward(f, problem, indices, flavor)
    gh = forward(g, problem, indices, flavor)
    return inverse(CoefficientVector(indices, fh.values * gh.values, flavor), problem, grid, flavor)
