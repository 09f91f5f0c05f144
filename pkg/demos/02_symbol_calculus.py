"""
Global symbols of differential operators
========================================

An operator is recovered from its action on eigenfunctions through
``sigma(x, xi) = (A u_xi)(x) / u_xi(x)``.  For a finite-difference Laplacian
the symbol should reproduce the eigenvalues ``lambda_xi`` up to stencil error.
"""
import numpy as np

from nhkit import IndexSet, SeparatedProblem, pd_multiplier, symbol_of
from nhkit.stencils import differential_operator, fd_grid, laplacian

problem = SeparatedProblem((0.5, 2.0))
indices = IndexSet(2, 2)
grid = fd_grid(2, indices.radius)
print(f"{len(indices)} indices on a grid of {grid.size} nodes")

###############################################################################
# The Laplacian acts on samples only; its symbol is x-independent up to the
# stencil error and matches lambda_xi.

sigma = symbol_of(laplacian(grid), problem, indices, grid)
lam = problem.eigenvalues(indices)
err = np.abs(sigma.values - lam[:, None]) / np.maximum(1.0, np.abs(lam[:, None]))
print("max relative error of the FD Laplacian symbol:", err.max())
print("x-variation of the symbol at xi = (1, -1):", np.ptp(np.abs(sigma.at((1, -1)).values)))

###############################################################################
# A mixed operator d_1^2 - 2 d_1 d_2 + 3, exact versus finite differences.

coeffs = {(2, 0): 1.0, (1, 1): -2.0, (0, 0): 3.0}
exact = pd_multiplier(coeffs, problem, indices)
fd = symbol_of(differential_operator(grid, coeffs), problem, indices, grid)
for xi in [(0, 0), (1, 0), (-1, 2)]:
    k = indices.position(xi)
    print(xi, "exact", np.round(exact.values[k], 4), " fd", np.round(fd.values[k].mean(), 4))
