"""Global symbol calculus relative to a model problem.

An operator is represented by one of

* :class:`Multiplier` - a function of ``xi`` alone, acting diagonally on
  L-Fourier coefficients (or on L*-coefficients, after taking adjoints);
* :class:`FullSymbol` - ``sigma(x, xi)`` sampled at grid nodes;
* :class:`KernelMatrix` - ``K(x_i, y_j)`` on the grid square;
* :class:`BlackBox` - any callable mapping SampledFunction to SampledFunction.

The symbol is recovered from the action on eigenfunctions,
``sigma(x, xi) = (A u_xi)(x) / u_xi(x)``, and quantised back by
``A f(x) = sum_xi u_xi(x) sigma(x, xi) f^(xi)``.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    GridMismatchError,
    InvalidArgumentError,
    SingularResolventError,
    WrongVariantError,
    WZViolationError,
)
from .problems import SeparatedProblem, eigensystem, weights
from .quad import SampledFunction
from .transform import forward

__all__ = [
    "Multiplier",
    "FullSymbol",
    "KernelMatrix",
    "BlackBox",
    "symbol_of",
    "quantize",
    "kernel_of",
    "apply_kernel",
    "adjoint_multiplier",
    "pd_multiplier",
    "resolvent_power",
    "weight_power",
    "indicator",
    "delta",
    "as_blackbox",
]

WZ_THRESHOLD = 1e-10
MAX_PD_ORDER = 8


@dataclass(frozen=True, eq=False)
class Multiplier:
    """``xi -> sigma(xi)`` on an index set.

    ``calculus="L"`` acts on L-coefficients against u_xi; ``"Lstar"`` acts on
    L*-coefficients against v_xi (the adjoint of an L-multiplier is of this
    kind).  ``meta`` carries derived diagnostics such as comparability ratios.
    """

    indices: object
    values: np.ndarray
    calculus: str = "L"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (len(self.indices),):
            raise InvalidArgumentError("sigma", f"expected {len(self.indices)} values, got {values.shape}")
        if self.calculus not in ("L", "Lstar"):
            raise InvalidArgumentError("calculus", f"must be 'L' or 'Lstar', got {self.calculus!r}")
        object.__setattr__(self, "values", values)

    def __getitem__(self, xi):
        return self.values[self.indices.position(xi)]

    def __mul__(self, other):
        if isinstance(other, Multiplier):
            if other.indices != self.indices or other.calculus != self.calculus:
                raise InvalidArgumentError("sigma", "multipliers live on different truncations or calculi")
            return Multiplier(self.indices, self.values * other.values, self.calculus)
        return Multiplier(self.indices, self.values * other, self.calculus)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class FullSymbol:
    """``sigma(x_i, xi)`` stored as an array of shape ``(len(indices), grid.size)``."""

    indices: object
    grid: object
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (len(self.indices), self.grid.size):
            raise InvalidArgumentError(
                "sigma", f"expected shape {(len(self.indices), self.grid.size)}, got {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def product(cls, window, multiplier):
        """``w(x) * sigma(xi)`` from a sampled window and a multiplier."""
        return cls(multiplier.indices, window.grid, multiplier.values[:, None] * window.values[None, :])

    def at(self, xi):
        return SampledFunction(self.grid, self.values[self.indices.position(xi)])


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """Kernel samples ``entries[i, j] = K(x_i, y_j)``."""

    grid: object
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        n = self.grid.size
        if entries.shape != (n, n):
            raise InvalidArgumentError("kernel", f"expected shape {(n, n)}, got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise InvalidArgumentError("kernel", "entries must be finite")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_function(cls, grid, func):
        """Sample ``func(x, y)`` with x, y arrays of shape ``(size, size, dimension)``."""
        x = grid.nodes[:, None, :]
        y = grid.nodes[None, :, :]
        return cls(grid, func(np.broadcast_to(x, (grid.size, grid.size, grid.dimension)),
                              np.broadcast_to(y, (grid.size, grid.size, grid.dimension))))


@dataclass(frozen=True, eq=False)
class BlackBox:
    """Operator known only through its action on node samples.

    The callable must be reentrant; it may be invoked concurrently.
    """

    action: Callable
    name: str = "blackbox"

    def __call__(self, f):
        return self.action(f)


def apply_kernel(kernel, f):
    """Quadrature application ``(Kf)(x_i) = sum_j K(x_i, y_j) f(y_j) w_j``."""
    if f.grid != kernel.grid:
        raise GridMismatchError("kernel and function live on different grids")
    return SampledFunction(f.grid, kernel.entries @ (f.grid.weights * f.values))


def _wz_guard(u, indices):
    au = np.abs(u)
    k, node = np.unravel_index(np.argmin(au), au.shape)
    if au[k, node] < WZ_THRESHOLD:
        raise WZViolationError(indices[k], int(node), complex(u[k, node]))


def symbol_of(A, problem, indices, grid):
    """Full symbol ``sigma(x, xi) = u_xi(x)^{-1} (A u_xi)(x)`` at the nodes of ``grid``."""
    if isinstance(A, FullSymbol):
        if A.indices != indices or A.grid != grid:
            raise GridMismatchError("full symbol was sampled on a different truncation or grid")
        return A
    if isinstance(A, Multiplier) and A.calculus == "L":
        if A.indices != indices:
            raise GridMismatchError("multiplier lives on a different truncation")
        return FullSymbol(indices, grid, np.repeat(A.values[:, None], grid.size, axis=1))
    if isinstance(A, Multiplier):
        A = kernel_of(A, problem, indices, grid)

    u, _ = eigensystem(problem, indices, grid)
    _wz_guard(u, indices)
    if isinstance(A, KernelMatrix):
        if A.grid != grid:
            raise GridMismatchError("kernel lives on a different grid")
        au = ((A.entries * grid.weights[None, :]) @ u.T).T
    elif isinstance(A, BlackBox) or callable(A):
        au = np.stack([A(SampledFunction(grid, row)).values for row in u])
    else:
        raise TypeError(f"cannot take the symbol of {type(A).__name__}")
    return FullSymbol(indices, grid, au / u)


def quantize(sigma, f, problem, indices):
    """``A f(x) = sum_xi u_xi(x) sigma(x, xi) f^(xi)`` (v_xi and f^_* in the L* calculus)."""
    grid = f.grid
    u, v = eigensystem(problem, indices, grid)
    if isinstance(sigma, Multiplier):
        if sigma.calculus == "L":
            return SampledFunction(grid, (sigma.values * forward(f, problem, indices, "L").values) @ u)
        return SampledFunction(grid, (sigma.values * forward(f, problem, indices, "Lstar").values) @ v)
    if isinstance(sigma, FullSymbol):
        if sigma.grid != grid:
            raise GridMismatchError("symbol and function live on different grids")
        fh = forward(f, problem, indices, "L").values
        return SampledFunction(grid, np.einsum("ki,ki,k->i", u, sigma.values, fh))
    raise TypeError(f"cannot quantize {type(sigma).__name__}")


def kernel_of(sigma, problem, indices, grid):
    """``K(x, y) = sum_xi u_xi(x) sigma(x, xi) conj(v_xi(y))`` on the grid square."""
    u, v = eigensystem(problem, indices, grid)
    if isinstance(sigma, Multiplier):
        if sigma.calculus == "L":
            return KernelMatrix(grid, (u.T * sigma.values) @ v.conj())
        return KernelMatrix(grid, (v.T * sigma.values) @ u.conj())
    if isinstance(sigma, FullSymbol):
        if sigma.grid != grid:
            raise GridMismatchError("symbol sampled on a different grid")
        return KernelMatrix(grid, (u * sigma.values).T @ v.conj())
    raise TypeError(f"cannot build a kernel from {type(sigma).__name__}")


def as_blackbox(A, problem, indices):
    """Wrap any operator representation as a BlackBox acting on samples."""
    if isinstance(A, BlackBox):
        return A
    if isinstance(A, KernelMatrix):
        return BlackBox(lambda f: apply_kernel(A, f), name="kernel")
    return BlackBox(lambda f: quantize(A, f, problem, indices), name="quantized")


def adjoint_multiplier(sigma):
    """Adjoint of a multiplier: conjugate symbol in the dual calculus."""
    dual = "Lstar" if sigma.calculus == "L" else "L"
    return Multiplier(sigma.indices, sigma.values.conj(), dual)


def pd_multiplier(coeffs, problem, indices, max_order=MAX_PD_ORDER):
    """Multiplier of ``P(D) = sum_alpha a_alpha d^alpha`` for the separated problem.

    ``d^alpha (h^x e^{2 pi i xi x}) = prod_j (ln h_j + 2 pi i xi_j)^alpha_j u_xi``.
    """
    if not isinstance(problem, SeparatedProblem):
        raise WrongVariantError("P(D) multipliers are defined for the separated problem only")
    c = problem.exponents(indices.points)
    sigma = np.zeros(len(indices), dtype=complex)
    for alpha, a in coeffs.items():
        alpha = (alpha,) if isinstance(alpha, int) else tuple(alpha)
        if len(alpha) != problem.dimension or any(k < 0 for k in alpha):
            raise InvalidArgumentError("alpha", f"bad multi-index {alpha}")
        if sum(alpha) > max_order:
            raise InvalidArgumentError("alpha", f"order {sum(alpha)} exceeds {max_order}")
        sigma += complex(a) * np.prod(c ** np.array(alpha), axis=1)
    return Multiplier(indices, sigma)


def resolvent_power(problem, s, indices):
    """Symbol ``(1 - lambda_xi)^(-s/m)`` (principal power) of ``(I - L)^(-s/m)``.

    ``meta["ratio_range"]`` holds the min and max over the truncation of
    ``|sigma(xi)| <xi>^s``, which stays bounded above and below.
    """
    if not s > 0:
        raise InvalidArgumentError("s", f"must be positive, got {s}")
    lam = problem.eigenvalues(indices)
    base = 1.0 - lam
    zero = np.flatnonzero(base == 0)
    if zero.size:
        raise SingularResolventError(indices[int(zero[0])])
    sigma = np.power(base, -s / problem.order)
    ratio = np.abs(sigma) * weights(problem, indices) ** s
    return Multiplier(indices, sigma, meta={"ratio_range": (float(ratio.min()), float(ratio.max()))})


def weight_power(problem, s, indices):
    """Multiplier ``<xi>^(-s)``."""
    return Multiplier(indices, weights(problem, indices) ** (-float(s)))


def indicator(indices, members):
    """0/1 multiplier supported on the given indices."""
    values = np.zeros(len(indices), dtype=complex)
    for xi in members:
        values[indices.position(xi)] = 1.0
    return Multiplier(indices, values)


def delta(indices, xi=None):
    if xi is None:
        xi = (0,) * indices.dimension
    return indicator(indices, [xi])
