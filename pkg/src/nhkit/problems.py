"""Model boundary value problems on [0, 1]^n and their biorthogonal eigen-systems.

Two problems are provided:

``SeparatedProblem``
    The Laplacian on [0, 1]^n with the quasi-periodic conditions
    ``h_j f|_{x_j=0} = f|_{x_j=1}`` (and the same for the normal
    derivative).  Eigenfunctions ``u_xi = h^x e^{2 pi i xi.x}``, dual system
    ``v_xi = h^{-x} e^{2 pi i xi.x}``, indexed by ``xi`` in Z^n.

``NonlocalProblem``
    ``-i d/dx`` on [0, 1] with ``a f(0) + b f(1) + int f q = 0``.  Its
    eigenvalues are the zeros of ``Delta(lam) = a + b e^{i lam} + int e^{i lam x} q``;
    only simple eigenvalues are supported.

Eigenfunctions are kept unnormalised; the binding contract is
``(u_xi, v_eta) = delta``.
"""
from dataclasses import dataclass, field
import cmath
import functools
import itertools
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
import scipy.linalg

from .errors import (
    InconsistentEigenpairError,
    InvalidArgumentError,
    MultiplicityError,
    WrongVariantError,
)
from .quad import SampledFunction
from .roots import polish_root

__all__ = [
    "IndexSet",
    "QProfile",
    "SeparatedProblem",
    "NonlocalProblem",
    "EigenPair",
    "SystemReport",
    "NonlocalSpectrum",
    "eigenvalue",
    "eigenpair",
    "weight",
    "verify_system",
    "nonlocal_char",
    "nonlocal_spectrum",
    "eigensystem",
]

NEWTON_TOL = 1e-12
NEWTON_MAXITER = 50
MULTIPLICITY_TOL = 1e-8
EIGENPAIR_TOL = 1e-6
RIESZ_BATCH = 32


# ---------------------------------------------------------------------------
# index sets


class IndexSet:
    """The lattice points ``xi`` with ``max|xi_j| <= radius``.

    Ordered by increasing sup-norm shell and lexicographically inside a
    shell, so the same ``(dimension, radius)`` always gives the same order.
    """

    def __init__(self, dimension, radius):
        if dimension not in (1, 2, 3):
            raise InvalidArgumentError("dimension", f"must be 1, 2 or 3, got {dimension}")
        if isinstance(radius, bool) or int(radius) != radius or radius < 0:
            raise InvalidArgumentError("radius", f"must be a nonnegative integer, got {radius}")
        self.dimension = int(dimension)
        self.radius = int(radius)
        rng = range(-self.radius, self.radius + 1)
        pts = sorted(itertools.product(rng, repeat=self.dimension), key=lambda p: (max(map(abs, p)), p))
        self.points = np.array(pts, dtype=int).reshape(len(pts), self.dimension)
        self.points.setflags(write=False)
        self.shells = np.abs(self.points).max(axis=1)
        self.shells.setflags(write=False)
        self._position = {p: k for k, p in enumerate(pts)}

    def __len__(self):
        return self.points.shape[0]

    def __iter__(self):
        for p in self.points:
            yield tuple(int(c) for c in p)

    def __getitem__(self, k):
        return tuple(int(c) for c in self.points[k])

    def __contains__(self, xi):
        return _as_index(xi, self.dimension) in self._position

    def position(self, xi):
        """Position of ``xi`` in the enumeration order."""
        return self._position[_as_index(xi, self.dimension)]

    def shell_mask(self, shell):
        return self.shells == shell

    def __eq__(self, other):
        return isinstance(other, IndexSet) and (self.dimension, self.radius) == (other.dimension, other.radius)

    def __hash__(self):
        return hash(("IndexSet", self.dimension, self.radius))

    def __repr__(self):
        return f"IndexSet(dimension={self.dimension}, radius={self.radius})"


def _as_index(xi, dimension):
    if isinstance(xi, (int, np.integer)):
        xi = (int(xi),)
    xi = tuple(int(c) for c in xi)
    if len(xi) != dimension:
        raise InvalidArgumentError("index", f"expected {dimension} components, got {xi}")
    return xi


# ---------------------------------------------------------------------------
# the density q of the nonlocal condition


@dataclass(frozen=True)
class QProfile:
    """Named built-in for the density ``q`` in ``a f(0) + b f(1) + int f q = 0``.

    ``zero``: q = 0.  ``cos``: q(x) = amplitude * cos(2 pi k x).
    ``poly``: q(x) = sum_k c_k x^k.
    """

    name: str = "zero"
    params: tuple = ()

    @classmethod
    def zero(cls):
        return cls("zero", ())

    @classmethod
    def cos(cls, amplitude, frequency=1):
        return cls("cos", (float(amplitude), int(frequency)))

    @classmethod
    def poly(cls, coeffs):
        return cls("poly", tuple(float(c) for c in coeffs))

    def __post_init__(self):
        if self.name not in ("zero", "cos", "poly"):
            raise InvalidArgumentError("q.name", f"unknown profile {self.name!r}")
        if self.name == "cos" and len(self.params) != 2:
            raise InvalidArgumentError("q.params", "cos needs (amplitude, frequency)")

    @property
    def is_zero(self):
        if self.name == "zero":
            return True
        if self.name == "cos":
            return self.params[0] == 0.0
        return all(c == 0.0 for c in self.params)

    @property
    def frequency(self):
        """Angular frequency scale of q, used to size quadrature rules."""
        return 2 * math.pi * abs(self.params[1]) if self.name == "cos" else 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.name == "zero":
            return np.zeros_like(t)
        if self.name == "cos":
            amp, k = self.params
            return amp * np.cos(2 * math.pi * k * t)
        return np.polynomial.polynomial.polyval(t, self.params)

    def integral(self):
        if self.name == "zero":
            return 0.0
        if self.name == "cos":
            amp, k = self.params
            return amp if k == 0 else 0.0
        return sum(c / (k + 1) for k, c in enumerate(self.params))


_GL16 = leggauss(16)


def _reference_rule(angular):
    """Composite 16-point rule on [0, 1] resolving e^{i angular x}."""
    panels = 2 + int(math.ceil(abs(angular) / (2 * math.pi)))
    t, w = _GL16
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    s = np.concatenate([(t + k) / panels for k in range(panels)])
    ws = np.tile(w / panels, panels)
    return s, ws


# ---------------------------------------------------------------------------
# problems


@dataclass(frozen=True)
class SeparatedProblem:
    """Laplacian on [0, 1]^n with conditions ``h_j f|_{x_j=0} = f|_{x_j=1}``."""

    h: tuple
    s0: float = None

    variant = "separated"
    order = 2

    def __post_init__(self):
        h = tuple(float(v) for v in np.atleast_1d(self.h))
        if not 1 <= len(h) <= 3:
            raise InvalidArgumentError("h", f"need 1 to 3 components, got {len(h)}")
        for j, v in enumerate(h):
            if not (v > 0 and math.isfinite(v)):
                raise InvalidArgumentError(f"h[{j}]", f"must be positive, got {v}")
        object.__setattr__(self, "h", h)
        s0 = len(h) + 0.5 if self.s0 is None else float(self.s0)
        if not s0 > len(h):
            raise InvalidArgumentError("s0", f"must exceed the dimension {len(h)}, got {s0}")
        object.__setattr__(self, "s0", s0)

    @property
    def dimension(self):
        return len(self.h)

    @property
    def log_h(self):
        return np.log(np.array(self.h))

    def exponents(self, points):
        """Rows ``ln h + 2 pi i xi``: u_xi(x) = exp(x . row)."""
        return self.log_h[None, :] + 2j * math.pi * np.asarray(points, dtype=float)

    def eigenvalue(self, xi):
        xi = _as_index(xi, self.dimension)
        c = self.exponents([xi])[0]
        return complex(np.sum(c * c))

    def eigenvalues(self, indices):
        c = self.exponents(indices.points)
        return np.sum(c * c, axis=1)

    def sample_pair(self, xi, grid):
        xi = _as_index(xi, self.dimension)
        c = self.exponents([xi])[0]
        u = np.exp(grid.nodes @ c)
        v = np.exp(grid.nodes @ (c - 2 * self.log_h))
        return u, v

    def _system(self, indices, grid):
        c = self.exponents(indices.points)
        u = np.exp(c @ grid.nodes.T)
        v = np.exp((c - 2 * self.log_h[None, :]) @ grid.nodes.T)
        return u, v


@dataclass(frozen=True)
class NonlocalProblem:
    """``-i d/dx`` on [0, 1] with ``a f(0) + b f(1) + int_0^1 f q = 0``.

    The normalisation ``a + b + int q = 1`` is enforced.
    """

    a: complex
    b: complex
    q: QProfile = field(default_factory=QProfile.zero)
    s0: float = None

    variant = "nonlocal"
    order = 1
    dimension = 1

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        if a == 0:
            raise InvalidArgumentError("a", "must be nonzero")
        if b == 0:
            raise InvalidArgumentError("b", "must be nonzero")
        total = a + b + self.q.integral()
        if abs(total - 1.0) > 1e-10:
            raise InvalidArgumentError("a", f"a + b + int q must equal 1, got {total}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        s0 = 1.5 if self.s0 is None else float(self.s0)
        if not s0 > 1:
            raise InvalidArgumentError("s0", f"must exceed 1, got {s0}")
        object.__setattr__(self, "s0", s0)

    @classmethod
    def normalized(cls, b, q=None, s0=None):
        """Pick ``a`` so that ``a + b + int q = 1``."""
        q = QProfile.zero() if q is None else q
        return cls(1.0 - complex(b) - q.integral(), b, q, s0)

    def char(self, lam):
        lam = complex(lam)
        value = self.a + self.b * cmath.exp(1j * lam)
        if not self.q.is_zero:
            s, w = _reference_rule(lam.real + self.q.frequency)
            value += complex(np.dot(w, np.exp(1j * lam * s) * self.q(s)))
        return value

    def char_derivative(self, lam):
        lam = complex(lam)
        value = 1j * self.b * cmath.exp(1j * lam)
        if not self.q.is_zero:
            s, w = _reference_rule(lam.real + self.q.frequency)
            value += complex(np.dot(w, 1j * s * np.exp(1j * lam * s) * self.q(s)))
        return value

    def seed(self, j):
        """Asymptotic location ``-i Log(-a/b) + 2 pi j`` (principal branch)."""
        return -1j * cmath.log(-self.a / self.b) + 2 * math.pi * int(j)

    def eigenvalue(self, j):
        return _nonlocal_root(self, _as_index(j, 1)[0])

    def eigenvalues(self, indices):
        return np.array([self.eigenvalue(j) for (j,) in indices], dtype=complex)

    def dual_values(self, lam, x):
        """v(x) for the simple eigenvalue ``lam`` at the points ``x``.

        The dual function is the complex conjugate of
        ``(i b e^{i lam (1-x)} + i int_x^1 e^{i lam (t-x)} q(t) dt) / Delta'(lam)``
        so that ``(u, v) = int u conj(v) = 1``.
        """
        x = np.asarray(x, dtype=float)
        w_vals = 1j * self.b * np.exp(1j * lam * (1.0 - x))
        if not self.q.is_zero:
            s, ws = _reference_rule(abs(lam.real) + self.q.frequency)
            length = 1.0 - x
            t = x[:, None] + length[:, None] * s[None, :]
            integrand = np.exp(1j * lam * (t - x[:, None])) * self.q(t)
            w_vals = w_vals + 1j * length * (integrand @ ws)
        return np.conj(w_vals / self.char_derivative(lam))

    def sample_pair(self, j, grid):
        lam = self.eigenvalue(j)
        x = grid.nodes[:, 0]
        return np.exp(1j * lam * x), self.dual_values(lam, x)

    def _system(self, indices, grid):
        lams = self.eigenvalues(indices)
        x = grid.nodes[:, 0]
        u = np.exp(1j * lams[:, None] * x[None, :])
        v = np.stack([self.dual_values(lam, x) for lam in lams])
        return u, v


@functools.lru_cache(maxsize=4096)
def _nonlocal_root(problem, j):
    seed = problem.seed(j)
    lam = polish_root(problem.char, problem.char_derivative, seed, tol=NEWTON_TOL, maxiter=NEWTON_MAXITER)
    d = problem.char_derivative(lam)
    if abs(d) < MULTIPLICITY_TOL:
        raise MultiplicityError(j, lam, d)
    return lam


def _check_problem(problem):
    if not isinstance(problem, (SeparatedProblem, NonlocalProblem)):
        raise WrongVariantError(f"not a problem descriptor: {problem!r}")


@functools.lru_cache(maxsize=64)
def _cached_system(problem, indices, grid):
    u, v = problem._system(indices, grid)
    u.setflags(write=False)
    v.setflags(write=False)
    return u, v


def eigensystem(problem, indices, grid):
    """Arrays ``(U, V)`` of shape ``(len(indices), grid.size)`` with rows u_xi and v_xi at the nodes."""
    _check_problem(problem)
    if indices.dimension != problem.dimension or grid.dimension != problem.dimension:
        raise InvalidArgumentError(
            "dimension",
            f"problem is {problem.dimension}-D; index set {indices.dimension}-D; grid {grid.dimension}-D",
        )
    return _cached_system(problem, indices, grid)


# ---------------------------------------------------------------------------
# public operations


@dataclass(frozen=True)
class EigenPair:
    index: tuple
    lam: complex
    u: SampledFunction
    v: SampledFunction


def eigenvalue(problem, index):
    """Eigenvalue lambda_xi of the model operator."""
    _check_problem(problem)
    return problem.eigenvalue(index)


def eigenpair(problem, index, grid, tol=EIGENPAIR_TOL):
    """Sample ``(u_xi, v_xi)`` on ``grid`` and self-check ``(u_xi, v_xi) = 1``."""
    _check_problem(problem)
    xi = _as_index(index, problem.dimension)
    lam = problem.eigenvalue(xi if problem.dimension > 1 else xi[0])
    u, v = problem.sample_pair(xi if problem.dimension > 1 else xi[0], grid)
    u, v = SampledFunction(grid, u), SampledFunction(grid, v)
    pairing = np.dot(grid.weights * u.values, v.values.conj())
    if abs(pairing - 1.0) > tol:
        raise InconsistentEigenpairError(
            f"(u, v) = {pairing:.6g} for index {xi}; grid {grid!r} is too coarse or the system is defective"
        )
    return EigenPair(xi, lam, u, v)


def weight(problem, index):
    """``<xi> = (1 + |lambda_xi|^2)^(1/(2m))``."""
    lam = eigenvalue(problem, index)
    return (1.0 + abs(lam) ** 2) ** (1.0 / (2 * problem.order))


def weights(problem, indices):
    lam = problem.eigenvalues(indices)
    return (1.0 + np.abs(lam) ** 2) ** (1.0 / (2 * problem.order))


def nonlocal_char(problem, lam):
    """Characteristic function Delta(lam) of the nonlocal problem."""
    if not isinstance(problem, NonlocalProblem):
        raise WrongVariantError("Delta(lambda) is only defined for the nonlocal problem")
    return problem.char(lam)


@dataclass(frozen=True)
class SystemReport:
    """Diagnostics of a truncated biorthogonal system on a grid.

    ``fit_u = (C1, nu1)`` and ``fit_v = (C2, nu2)`` satisfy
    ``max|u_xi| <= C1 <xi>^nu1`` (resp. for v) on the whole truncation: the
    exponent comes from a log-log least-squares fit and the constant is the
    smallest one that makes the bound hold.

    ``riesz_batch`` is the (min, max) of ``sum |f^(xi)|^2 / ||f||^2`` over the
    random test batch; ``riesz_span`` the exact extremes of that ratio over
    the span of the truncated u-system (so ``m^2, l^2``), and
    ``riesz_span_star`` the same for the L* transform over the v-system.
    """

    biorthogonality_defect: float
    weights: np.ndarray
    u_min: np.ndarray
    u_max: np.ndarray
    v_min: np.ndarray
    v_max: np.ndarray
    u_l2: np.ndarray
    v_l2: np.ndarray
    fit_u: tuple
    fit_v: tuple
    riesz_batch: tuple
    riesz_span: tuple
    riesz_span_star: tuple

    @property
    def m(self):
        return math.sqrt(self.riesz_span[0])

    @property
    def ell(self):
        return math.sqrt(self.riesz_span[1])


def _envelope_fit(weights_, sup, min_weight=2.0):
    sel = weights_ >= min_weight
    nu = 0.0
    if np.count_nonzero(sel) >= 2 and np.ptp(np.log(weights_[sel])) > 0:
        nu = float(np.polyfit(np.log(weights_[sel]), np.log(sup[sel]), 1)[0])
    nu = max(nu, 0.0)
    c = float(np.max(sup / weights_**nu))
    return c, nu


def _rayleigh_extremes(numerator, denominator):
    vals = scipy.linalg.eigh(numerator, denominator, eigvals_only=True)
    return float(vals[0]), float(vals[-1])


def verify_system(problem, indices, grid, seed=0):
    """Biorthogonality, sup/inf bounds, growth fits and Riesz constants of the truncated system."""
    u, v = eigensystem(problem, indices, grid)
    w = grid.weights
    gram = (u * w) @ v.conj().T  # gram[xi, eta] = (u_xi, v_eta)
    defect = float(np.max(np.abs(gram - np.eye(len(indices)))))
    au, av = np.abs(u), np.abs(v)
    wts = weights(problem, indices)

    gu = (u * w) @ u.conj().T  # (u_xi, u_eta)
    gv = (v * w) @ v.conj().T
    # f = sum c_xi u_xi has fhat = gram^T c and ||f||^2 = c^H conj(gu) c
    gt = gram.T
    span = _rayleigh_extremes(gt.conj().T @ gt, gu.conj())
    # g = sum c_xi v_xi has ghat_* = gram^H-type coefficients (v_xi, u_eta) = conj(gram[eta, xi])
    hs = gram.conj()
    span_star = _rayleigh_extremes(hs.conj().T @ hs, gv.conj())

    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((RIESZ_BATCH, len(indices))) + 1j * rng.standard_normal((RIESZ_BATCH, len(indices)))
    fvals = coeffs @ u
    fhat = (fvals * w) @ v.conj().T
    ratios = np.sum(np.abs(fhat) ** 2, axis=1) / (np.abs(fvals) ** 2 @ w)

    return SystemReport(
        biorthogonality_defect=defect,
        weights=wts,
        u_min=au.min(axis=1),
        u_max=au.max(axis=1),
        v_min=av.min(axis=1),
        v_max=av.max(axis=1),
        u_l2=np.sqrt(au**2 @ w),
        v_l2=np.sqrt(av**2 @ w),
        fit_u=_envelope_fit(wts, au.max(axis=1)),
        fit_v=_envelope_fit(wts, av.max(axis=1)),
        riesz_batch=(float(ratios.min()), float(ratios.max())),
        riesz_span=span,
        riesz_span_star=span_star,
    )


# ---------------------------------------------------------------------------
# nonlocal spectrum report


def _expint(c):
    """int_0^1 e^{c x} dx."""
    c = complex(c)
    if abs(c) < 1e-6:
        return 1.0 + c / 2 + c * c / 6
    return (cmath.exp(c) - 1.0) / c


def _dist2(lam, mu):
    """||e^{i lam x} - e^{i mu x}||^2 on L^2(0, 1), in closed form."""
    aa = _expint(-2 * lam.imag)
    bb = _expint(-2 * mu.imag)
    cross = _expint(1j * (lam - mu.conjugate()))
    return float((aa + bb - 2 * cross.real).real)


@dataclass(frozen=True)
class NonlocalSpectrum:
    """Eigenvalues of the nonlocal problem over an index set, in enumeration order.

    ``alpha`` are the offsets from the asymptotic seeds; ``harmonic_distance``
    holds ``||e^{i lam_j x} - e^{2 pi i j x}||^2`` and ``seed_distance``
    ``||e^{i lam_j x} - e^{i (lam_j - alpha_j) x}||^2``.
    """

    indices: IndexSet
    eigenvalues: np.ndarray
    alpha: np.ndarray
    residual: np.ndarray
    derivative: np.ndarray
    harmonic_distance: np.ndarray
    seed_distance: np.ndarray

    def alpha_power_sum(self, exponent):
        return float(np.sum(np.abs(self.alpha) ** exponent))


def nonlocal_spectrum(problem, indices):
    if not isinstance(problem, NonlocalProblem):
        raise WrongVariantError("nonlocal_spectrum needs a NonlocalProblem")
    js = [j for (j,) in indices]
    lams = np.array([problem.eigenvalue(j) for j in js])
    seeds = np.array([problem.seed(j) for j in js])
    return NonlocalSpectrum(
        indices=indices,
        eigenvalues=lams,
        alpha=lams - seeds,
        residual=np.array([abs(problem.char(l)) for l in lams]),
        derivative=np.array([problem.char_derivative(l) for l in lams]),
        harmonic_distance=np.array([_dist2(l, complex(2 * math.pi * j)) for l, j in zip(lams, js)]),
        seed_distance=np.array([_dist2(l, s) for l, s in zip(lams, seeds)]),
    )
