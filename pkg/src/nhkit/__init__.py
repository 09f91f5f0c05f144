"""Numerical toolkit for pseudo-differential operators in nonharmonic (biorthogonal) analysis.

Modules
-------
quad       composite Gauss-Legendre grids and sampled functions
problems   model boundary problems and their biorthogonal eigensystems
transform  L-Fourier transform, Parseval pairs and L-convolution
symbols    symbol extraction, quantization, kernels and named multipliers
stencils   finite-difference operators on Gauss grids
schatten   Nyström matrices, Schatten norms, traces and nuclearity bounds
cli        configuration-driven experiment runner
"""
from .errors import *  # noqa: F401,F403
from .quad import Grid, SampledFunction, build_grid, grid_for, inner_product, lp_norm
from .problems import (
    IndexSet,
    NonlocalProblem,
    QProfile,
    SeparatedProblem,
    eigenpair,
    eigensystem,
    eigenvalue,
    nonlocal_char,
    nonlocal_spectrum,
    verify_system,
    weight,
    weights,
)
from .transform import CoefficientVector, convolve, forward, inverse, parseval
from .symbols import (
    BlackBox,
    FullSymbol,
    KernelMatrix,
    Multiplier,
    adjoint_multiplier,
    kernel_of,
    pd_multiplier,
    quantize,
    resolvent_power,
    symbol_of,
)
from .schatten import (
    discretize,
    eigen_summability,
    eigenvalues,
    hs_norm_kernel,
    hs_norm_symbol,
    lq_bounds_check,
    nuclearity_report,
    schatten_quasi_norm,
    singular_values,
    trace_report,
)

__version__ = "0.1.0"
