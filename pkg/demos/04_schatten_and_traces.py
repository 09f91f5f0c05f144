"""
Schatten norms, traces and nuclearity bounds
============================================

Operators are discretised by the Nystrom method; singular values give the
Schatten quasi-norms and eigenvalues give the spectral trace.
"""
import math

import numpy as np

from nhkit import (
    FullSymbol,
    IndexSet,
    SeparatedProblem,
    discretize,
    grid_for,
    nuclearity_report,
    schatten_quasi_norm,
    singular_values,
    trace_report,
)
from nhkit.symbols import Multiplier, weight_power

###############################################################################
# For h = 1 a multiplier is normal and its singular values are |sigma(xi)|.

problem = SeparatedProblem((1.0,))
indices = IndexSet(1, 8)
grid = grid_for(1, indices.radius)
rng = np.random.default_rng(1)
sigma = Multiplier(indices, rng.uniform(0.1, 1.0, len(indices)) * np.exp(2j * np.pi * rng.uniform(size=len(indices))))
sv = singular_values(discretize(sigma, problem, indices, grid))
for r in (0.5, 2 / 3, 1.0, 2.0):
    print(f"r = {r:.3f}: S_r = {schatten_quasi_norm(sv, r):.12f}, "
          f"(sum |sigma|^r)^(1/r) = {np.sum(np.abs(sigma.values) ** r) ** (1 / r):.12f}")

###############################################################################
# Three traces of a windowed smoothing operator w(x) <xi>^(-s) for h = e.

problem = SeparatedProblem((math.e,))
indices = IndexSet(1, 12)
grid = grid_for(1, indices.radius)
window = grid.sample(lambda x: 1.0 + 0.3 * np.cos(2 * np.pi * x))
A = FullSymbol.product(window, weight_power(problem, 2.5, indices))
rep = trace_report(A, problem, indices, grid)
print("kernel diagonal:", rep.kernel)
print("symbol sum:     ", rep.symbol)
print("eigenvalue sum: ", rep.eigen)

###############################################################################
# The r-nuclear bound dominates the Schatten quasi-norm.

B = weight_power(problem, 3.0, indices)
for r in (0.5, 1.0):
    nuc = nuclearity_report(B, problem, indices, grid, r=r)
    print(f"r = {r}: S_r = {nuc.schatten:.6f} <= bound {nuc.bound:.6f}")
