"""Nyström matrices, singular values, Schatten quasi-norms, traces and nuclearity bounds.

Every operator is reduced to a kernel on the grid square and realised as
``M = W^{1/2} K W^{1/2}`` with ``W`` the diagonal of quadrature weights.
The symmetric weighting keeps the nonzero spectrum of ``K W`` (the two are
similar) while making the singular values of ``M`` approximate the L^2
singular values of the operator.
"""
from dataclasses import dataclass, field
import math

import numpy as np
import scipy.linalg

from .errors import EigensolverError, InvalidArgumentError, WrongVariantError
from .problems import IndexSet, SeparatedProblem, eigensystem, verify_system, weights
from .quad import lp_norm, SampledFunction
from .symbols import FullSymbol, KernelMatrix, Multiplier, kernel_of, symbol_of

__all__ = [
    "DiscretizedOperator",
    "SingularSpectrum",
    "HSReport",
    "TraceReport",
    "NuclearityReport",
    "SummabilityReport",
    "BoundReport",
    "discretize",
    "singular_values",
    "eigenvalues",
    "spectrum",
    "schatten_quasi_norm",
    "hs_norm_kernel",
    "hs_norm_symbol",
    "hs_constants",
    "trace_report",
    "nuclearity_report",
    "shell_partial_sums",
    "eigen_summability",
    "summability_exponent",
    "lq_bounds_check",
]


# ---------------------------------------------------------------------------
# discretisation and spectra


@dataclass(frozen=True, eq=False)
class DiscretizedOperator:
    grid: object
    matrix: np.ndarray

    @property
    def dimension(self):
        return self.matrix.shape[0]

    def frobenius(self):
        return float(np.linalg.norm(self.matrix))


@dataclass(frozen=True, eq=False)
class SingularSpectrum:
    """Singular values (descending) and eigenvalues (descending modulus) of a matrix."""

    singular_values: np.ndarray = None
    eigenvalues: np.ndarray = None

    def cutoff(self):
        s = self.singular_values
        if s is None or s.size == 0:
            return 0.0
        return s.size * np.finfo(float).eps * s[0]


def _as_kernel(A, problem, indices, grid):
    if isinstance(A, KernelMatrix):
        if A.grid != grid:
            raise InvalidArgumentError("grid", "kernel lives on a different grid")
        return A
    if isinstance(A, (Multiplier, FullSymbol)):
        return kernel_of(A, problem, indices, grid)
    return kernel_of(symbol_of(A, problem, indices, grid), problem, indices, grid)


def discretize(A, problem, indices, grid):
    """Nyström matrix ``M_ij = w_i^{1/2} K(x_i, x_j) w_j^{1/2}``."""
    kernel = _as_kernel(A, problem, indices, grid)
    sw = np.sqrt(grid.weights)
    return DiscretizedOperator(grid, sw[:, None] * kernel.entries * sw[None, :])


def singular_values(M):
    matrix = M.matrix if isinstance(M, DiscretizedOperator) else np.asarray(M)
    s = scipy.linalg.svdvals(matrix)
    return SingularSpectrum(singular_values=s)


def eigenvalues(M):
    """Dense eigenvalues sorted by descending modulus (LAPACK geev: Hessenberg + shifted QR)."""
    matrix = M.matrix if isinstance(M, DiscretizedOperator) else np.asarray(M)
    try:
        lam = scipy.linalg.eigvals(matrix, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverError(str(exc)) from exc
    order = np.lexsort((np.angle(lam), -np.abs(lam)))
    return SingularSpectrum(eigenvalues=lam[order])


def spectrum(M):
    return SingularSpectrum(singular_values(M).singular_values, eigenvalues(M).eigenvalues)


def schatten_quasi_norm(s, r):
    """``(sum s_j^r)^(1/r)`` over singular values above ``dim * eps * s_max``."""
    if not (r > 0 and math.isfinite(r)):
        raise InvalidArgumentError("r", f"must be a positive finite number, got {r}")
    if not isinstance(s, SingularSpectrum):
        vals = np.sort(np.asarray(s, dtype=float))[::-1]
        s = SingularSpectrum(singular_values=vals)
    vals = s.singular_values
    if vals.size == 0 or vals[0] == 0:
        return 0.0
    kept = vals[vals > s.cutoff()]
    # scale out the maximum so that small r does not underflow
    top = kept[0]
    return float(top * np.sum((kept / top) ** r) ** (1.0 / r))


def hs_norm_kernel(K, grid=None):
    """``(sum_ij |K(x_i, y_j)|^2 w_i w_j)^(1/2)``."""
    grid = K.grid if grid is None else grid
    w = grid.weights
    return float(np.sqrt(np.einsum("i,ij,j->", w, np.abs(K.entries) ** 2, w)))


# ---------------------------------------------------------------------------
# Hilbert-Schmidt norm from the symbol


@dataclass(frozen=True)
class HSReport:
    """Symbol-side Hilbert-Schmidt quantities.

    ``plain`` is ``(int sum |sigma|^2 dx)^(1/2)``; ``convolution`` the value
    obtained by convolving sigma with the torus Fourier coefficients of
    ``h^z`` over the whole lattice (closed-form autocorrelation);
    ``convolution_truncated`` the same sum cut to ``|xi|_inf <= 2N + 1`` and
    ``tail = convolution**2 - convolution_truncated**2``.
    """

    plain: float
    convolution: float
    convolution_truncated: float
    tail: float
    truncation_radius: int
    c_min: float
    c_max: float

    @property
    def sandwich_holds(self):
        slack = 1e-8 * max(1.0, self.convolution)
        return self.c_min * self.plain - slack <= self.convolution <= self.c_max * self.plain + slack


def hs_constants(h):
    """``(C_min, C_max) = (prod min(1, h_j), prod max(1, h_j))``: extremes of ``h^z`` on the cube."""
    h = np.asarray(h, dtype=float)
    return float(np.prod(np.minimum(1.0, h))), float(np.prod(np.maximum(1.0, h)))


def torus_coefficients(h, points):
    """``int_[0,1]^n e^{-2 pi i xi z} h^z dz`` at the integer points, delta in axes with h_j = 1."""
    points = np.atleast_2d(points)
    out = np.ones(points.shape[0], dtype=complex)
    for j, hj in enumerate(h):
        k = points[:, j]
        if hj == 1.0:
            out *= k == 0
        else:
            out *= (hj - 1.0) / (math.log(hj) - 2j * math.pi * k)
    return out


def _autocorrelation(h, diffs):
    """``sum_zeta F(zeta) conj F(zeta + k) = prod_j int h_j^{2z} e^{2 pi i k_j z} dz`` at ``k = diffs``."""
    out = np.ones(diffs.shape[:-1], dtype=complex)
    for j, hj in enumerate(h):
        k = diffs[..., j]
        if hj == 1.0:
            out *= k == 0
        else:
            out *= (hj * hj - 1.0) / (2.0 * math.log(hj) + 2j * math.pi * k)
    return out


def _symbol_rows(sigma, problem, indices, grid):
    if isinstance(sigma, Multiplier):
        if sigma.calculus != "L":
            raise InvalidArgumentError("sigma", "Hilbert-Schmidt symbol formula needs an L-calculus symbol")
        return sigma.values[:, None], np.ones(1)
    fs = symbol_of(sigma, problem, indices, grid)
    return fs.values, grid.weights


def hs_norm_symbol(sigma, problem, indices, grid):
    """Hilbert-Schmidt norm of the operator with symbol ``sigma`` through the torus convolution."""
    if not isinstance(problem, SeparatedProblem):
        raise WrongVariantError("the convolution form of the HS norm is for the separated problem")
    values, w = _symbol_rows(sigma, problem, indices, grid)
    h = problem.h
    c_min, c_max = hs_constants(h)

    plain2 = float(np.sum(w * np.sum(np.abs(values) ** 2, axis=0)))

    radius = 2 * indices.radius + 1
    if all(hj == 1.0 for hj in h):
        # the torus coefficients of h^z are a delta: convolution is the identity
        exact2 = trunc2 = plain2
    else:
        pts = indices.points
        gram = _autocorrelation(h, pts[:, None, :] - pts[None, :, :])
        exact2 = float(np.real(np.einsum("i,ki,kl,li->", w, values, gram, values.conj())))
        box = IndexSet(indices.dimension, radius).points
        coeff = torus_coefficients(h, (box[:, None, :] - pts[None, :, :]).reshape(-1, indices.dimension))
        conv = coeff.reshape(box.shape[0], pts.shape[0]) @ values
        trunc2 = float(np.sum(w * np.sum(np.abs(conv) ** 2, axis=0)))

    return HSReport(
        plain=math.sqrt(plain2),
        convolution=math.sqrt(max(exact2, 0.0)),
        convolution_truncated=math.sqrt(trunc2),
        tail=exact2 - trunc2,
        truncation_radius=radius,
        c_min=c_min,
        c_max=c_max,
    )


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class TraceReport:
    kernel: complex
    symbol: complex
    eigen: complex

    def deviations(self):
        pairs = {"kernel-symbol": (self.kernel, self.symbol),
                 "kernel-eigen": (self.kernel, self.eigen),
                 "symbol-eigen": (self.symbol, self.eigen)}
        out = {}
        for name, (a, b) in pairs.items():
            d = abs(a - b)
            out[name] = (d, d / max(abs(a), abs(b), np.finfo(float).tiny))
        return out

    @property
    def max_relative(self):
        return max(rel for _, rel in self.deviations().values())


def trace_report(A, problem, indices, grid):
    """Kernel-diagonal, symbol and eigenvalue-sum traces of ``A``."""
    kernel = _as_kernel(A, problem, indices, grid)
    tr_kernel = complex(np.sum(grid.weights * np.diag(kernel.entries)))

    if isinstance(A, Multiplier) and A.calculus == "L":
        tr_symbol = complex(np.sum(A.values))
    else:
        if isinstance(A, Multiplier):
            A = kernel
        fs = symbol_of(A, problem, indices, grid)
        u, v = eigensystem(problem, indices, grid)
        tr_symbol = complex(np.sum((u * fs.values * v.conj()) @ grid.weights))

    M = discretize(kernel, problem, indices, grid)
    tr_eigen = complex(np.sum(eigenvalues(M).eigenvalues))
    return TraceReport(tr_kernel, tr_symbol, tr_eigen)


# ---------------------------------------------------------------------------
# nuclearity


def _conjugate_exponent(p):
    if p == 1:
        return math.inf
    return p / (p - 1.0)


@dataclass(frozen=True, eq=False)
class NuclearityReport:
    """Sufficient-condition sums for r-nuclearity.

    ``terms[k] = ||sigma(., xi_k) u_xi_k||_{p2}^r ||v_xi_k||_{q1}^r`` and
    ``sum_value`` is their sum, a bound for ``n_r(A)^r``; ``bound`` is its
    r-th root.  ``shell_shares[N]`` is the share of the outermost shell in
    the partial sum up to shell N.  For separated problems ``rnuc_bound`` is
    ``C_h (sum ||sigma(., xi)||_{p2}^r)^(1/r)``.
    """

    r: float
    p1: float
    p2: float
    q1: float
    terms: np.ndarray
    sum_value: float
    shell_shares: np.ndarray
    multiplier_sum: float = None
    c_h: float = None
    c_h_literal: float = None
    rnuc_sum: float = None
    c_min: float = None
    c_max: float = None
    schatten: float = None

    @property
    def bound(self):
        return self.sum_value ** (1.0 / self.r)

    @property
    def rnuc_bound(self):
        if self.rnuc_sum is None:
            return None
        return self.c_h * self.rnuc_sum ** (1.0 / self.r)

    @property
    def tail_share(self):
        return float(self.shell_shares[-1])


def _check_rp(r, p1, p2):
    if not 0 < r <= 1:
        raise InvalidArgumentError("r", f"must lie in (0, 1], got {r}")
    for name, p in (("p1", p1), ("p2", p2)):
        if not (1 <= p < math.inf):
            raise InvalidArgumentError(name, f"must lie in [1, inf), got {p}")


def _row_norms(rows, grid, p):
    return np.array([lp_norm(SampledFunction(grid, row), p) for row in rows])


def shell_partial_sums(values, indices):
    """Partial sums over shells ``0..N`` and the share of the last shell in each."""
    values = np.asarray(values, dtype=float)
    per_shell = np.bincount(indices.shells, weights=values, minlength=indices.radius + 1)
    partial = np.cumsum(per_shell)
    with np.errstate(invalid="ignore", divide="ignore"):
        shares = np.where(partial > 0, per_shell / partial, 0.0)
    return partial, shares


def nuclearity_report(A, problem, indices, grid, r, p1=2.0, p2=2.0):
    _check_rp(r, p1, p2)
    q1 = _conjugate_exponent(p1)
    u, v = eigensystem(problem, indices, grid)
    if isinstance(A, Multiplier) and A.calculus == "L":
        sym = np.repeat(A.values[:, None], grid.size, axis=1)
    else:
        sym = symbol_of(A, problem, indices, grid).values

    g_norm = _row_norms(u * sym, grid, p2)
    v_norm = _row_norms(v, grid, q1)
    terms = (g_norm * v_norm) ** r
    _, shares = shell_partial_sums(terms, indices)
    extra = {}

    if isinstance(A, Multiplier) and A.calculus == "L":
        u_norm = _row_norms(u, grid, p2)
        extra["multiplier_sum"] = float(np.sum((np.abs(A.values) * u_norm * v_norm) ** r))

    if isinstance(problem, SeparatedProblem):
        h = np.array(problem.h)
        # sup of h^x and h^-x on the cube
        extra["c_h"] = float(np.prod(np.maximum(1.0, h)) * np.prod(np.maximum(1.0, 1.0 / h)))
        extra["c_h_literal"] = float(max(1.0, h.max()) * max(1.0, (1.0 / h).max()))
        extra["rnuc_sum"] = float(np.sum(_row_norms(sym, grid, p2) ** r))
        extra["c_min"], extra["c_max"] = hs_constants(h)

    if p1 == 2 and p2 == 2:
        M = discretize(A, problem, indices, grid)
        extra["schatten"] = schatten_quasi_norm(singular_values(M), r)

    return NuclearityReport(
        r=float(r), p1=float(p1), p2=float(p2), q1=q1,
        terms=terms, sum_value=float(np.sum(terms)), shell_shares=shares, **extra,
    )


# ---------------------------------------------------------------------------
# eigenvalue summability


@dataclass(frozen=True)
class SummabilityReport:
    r: float
    p: float
    s: float
    value: float
    two_thirds: bool
    lidskii_relation: bool

    @property
    def trace_formula_expected(self):
        return self.two_thirds or self.lidskii_relation


def summability_exponent(r, p):
    """``s`` with ``1/s = 1/r - |1/2 - 1/p|``."""
    if not 0 < r <= 1:
        raise InvalidArgumentError("r", f"must lie in (0, 1], got {r}")
    if not 1 <= p < math.inf:
        raise InvalidArgumentError("p", f"must lie in [1, inf), got {p}")
    return 1.0 / (1.0 / r - abs(0.5 - 1.0 / p))


def eigen_summability(spec, r, p):
    """``(sum |lambda_j|^s)^(1/s)`` with the Grothendieck-Lidskii regime flags.

    No constant is attached: the report gives the left-hand side only.
    """
    s = summability_exponent(r, p)
    lam = np.abs(np.asarray(spec.eigenvalues if isinstance(spec, SingularSpectrum) else spec))
    value = float(np.sum(lam**s) ** (1.0 / s)) if lam.size else 0.0
    return SummabilityReport(
        r=float(r), p=float(p), s=s, value=value,
        two_thirds=r <= 2.0 / 3.0 + 1e-12,
        lidskii_relation=abs(1.0 / r - 1.0 - abs(0.5 - 1.0 / p)) <= 1e-12,
    )


# ---------------------------------------------------------------------------
# L^q bounds for the biorthogonal system


@dataclass(frozen=True, eq=False)
class BoundReport:
    """L^q norms of the system against the envelope bounds.

    ``u_bound``/``v_bound`` are ``(C <xi>^nu)^(1-2/q) ||.||_2^(2/q)`` for
    ``q >= 2`` and ``||.||_2`` for ``q <= 2`` (unit-measure cube); with
    unit L^2 norms they reduce to the textbook envelope and to 1.
    ``condition_sums`` holds the four sums (i)-(iv) for the supplied
    ``gamma``; ``thresholds`` the smallest admissible decay ``s`` in cases
    (i) ``p >= 2`` and (ii) ``p <= 2``.
    """

    q: float
    fit_u: tuple
    fit_v: tuple
    u_norms: np.ndarray
    v_norms: np.ndarray
    u_bound: np.ndarray
    v_bound: np.ndarray
    u_normalized: np.ndarray
    v_normalized: np.ndarray
    u_normalized_bound: np.ndarray
    v_normalized_bound: np.ndarray
    condition_sums: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)

    @property
    def holds(self):
        tol = 1e-10
        return bool(np.all(self.u_norms <= self.u_bound * (1 + tol))
                    and np.all(self.v_norms <= self.v_bound * (1 + tol)))

    @property
    def normalized_holds(self):
        tol = 1e-10
        return bool(np.all(self.u_normalized <= self.u_normalized_bound * (1 + tol))
                    and np.all(self.v_normalized <= self.v_normalized_bound * (1 + tol)))


def _envelope_bound(q, c, nu, wts, l2):
    if q <= 2:
        return l2.copy()
    theta = 0.0 if math.isinf(q) else 2.0 / q
    return (c * wts**nu) ** (1.0 - theta) * l2**theta


def lq_bounds_check(problem, indices, grid, q, system=None, gamma=None, r=1.0, p1=2.0, p2=2.0, s=None):
    if isinstance(q, str) and q.lower() == "inf":
        q = math.inf
    q = float(q)
    if q < 1:
        raise InvalidArgumentError("q", f"must be >= 1, got {q}")
    system = verify_system(problem, indices, grid) if system is None else system
    u, v = eigensystem(problem, indices, grid)
    wts = weights(problem, indices)
    (c1, nu1), (c2, nu2) = system.fit_u, system.fit_v

    u_q = _row_norms(u, grid, q)
    v_q = _row_norms(v, grid, q)
    un = u / system.u_l2[:, None]
    vn = v / system.v_l2[:, None]
    ones = np.ones(len(indices))
    un_fit_c = float(np.max(np.abs(un).max(axis=1) / wts**nu1))
    vn_fit_c = float(np.max(np.abs(vn).max(axis=1) / wts**nu2))

    sums = {}
    if gamma is not None:
        gamma = np.abs(np.asarray(gamma, dtype=float))
        e1 = nu1 * (1 - 2 / p2) + nu2 * (2 / p1 - 1)
        sums = {
            "i": float(np.sum((wts**e1 * gamma) ** r)),
            "ii": float(np.sum((wts ** (nu1 * (1 - 2 / p2)) * gamma) ** r)),
            "iii": float(np.sum((wts ** (nu2 * (2 / p1 - 1)) * gamma) ** r)),
            "iv": float(np.sum(gamma**r)),
        }
    thresholds = {}
    if s is not None:
        p = p1
        s0 = problem.s0
        thresholds = {
            "i": nu1 * (p - 2) / p + s0 / r if p >= 2 else None,
            "ii": nu2 * (2 / p - 1) + s0 / r if p <= 2 else None,
        }
        thresholds = {k: (t, s >= t) for k, t in thresholds.items() if t is not None}

    return BoundReport(
        q=q,
        fit_u=(c1, nu1),
        fit_v=(c2, nu2),
        u_norms=u_q,
        v_norms=v_q,
        u_bound=_envelope_bound(q, c1, nu1, wts, system.u_l2),
        v_bound=_envelope_bound(q, c2, nu2, wts, system.v_l2),
        u_normalized=_row_norms(un, grid, q),
        v_normalized=_row_norms(vn, grid, q),
        u_normalized_bound=_envelope_bound(q, un_fit_c, nu1, wts, ones),
        v_normalized_bound=_envelope_bound(q, vn_fit_c, nu2, wts, ones),
        condition_sums=sums,
        thresholds=thresholds,
    )
