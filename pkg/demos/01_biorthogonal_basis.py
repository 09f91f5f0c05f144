"""
Biorthogonal eigenfunction expansions
=====================================

The Laplacian on the unit interval with the twisted condition
``h f(0) = f(1)`` has eigenfunctions ``u_xi = h^x e^{2 pi i xi x}`` that are
not orthogonal.  Their dual family ``v_xi = h^{-x} e^{2 pi i xi x}`` restores
a Fourier-type expansion.
"""
import math

import numpy as np

from nhkit import IndexSet, SampledFunction, SeparatedProblem, eigensystem, grid_for, verify_system
from nhkit import forward, inverse, parseval

problem = SeparatedProblem((math.e,))
indices = IndexSet(1, 8)
grid = grid_for(1, indices.radius)
print(f"{len(indices)} indices, {grid.size} quadrature nodes")

###############################################################################
# The Gram matrix (u_xi, v_eta) is the identity to rounding error, while
# (u_xi, u_eta) is far from it.

u, v = eigensystem(problem, indices, grid)
gram = (u * grid.weights) @ v.conj().T
plain = (u * grid.weights) @ u.conj().T
print("max |(u, v) - I| =", np.max(np.abs(gram - np.eye(len(indices)))))
print("max off-diagonal |(u, u)| =", np.max(np.abs(plain - np.diag(np.diag(plain)))))

###############################################################################
# The report collects Riesz constants and growth fits of the sup norms.

report = verify_system(problem, indices, grid)
print("Riesz constants on the span:", report.riesz_span)
print("sup-norm growth exponents m, ell:", report.m, report.ell)

###############################################################################
# A band-limited function is recovered from its L-coefficients, and the
# bilinear Parseval identity pairs L- and L*-coefficients.

rng = np.random.default_rng(0)
c = rng.standard_normal(len(indices)) + 1j * rng.standard_normal(len(indices))
f = SampledFunction(grid, c @ u)
g = SampledFunction(grid, rng.standard_normal(len(indices)) @ u)
back = inverse(forward(f, problem, indices), problem, grid)
print("round trip error:", np.max(np.abs(back.values - f.values)))
lhs, rhs = parseval(f, g, problem, indices)
print("Parseval: (f, g) =", lhs, " sum f^ conj(g^_*) =", rhs)
