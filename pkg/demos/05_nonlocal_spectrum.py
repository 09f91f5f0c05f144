"""
A first-order problem with a nonlocal boundary condition
========================================================

The operator ``-i d/dx`` with ``a f(0) + b f(1) + int f q = 0`` has
eigenvalues at the zeros of ``a + b e^{i lambda} + int e^{i lambda x} q``.
For q = 0 they form a shifted lattice; a smooth q perturbs them by an
amount that decays in |j|.
"""
import math


from nhkit import IndexSet, NonlocalProblem, QProfile, grid_for, nonlocal_spectrum, verify_system

indices = IndexSet(1, 32)
flat = nonlocal_spectrum(NonlocalProblem.normalized(-1.0), indices)
print("q = 0, j = 0, 1:", flat.eigenvalues[indices.position((0,))], flat.eigenvalues[indices.position((1,))])
print("expected:        ", -1j * math.log(2), 2 * math.pi - 1j * math.log(2))

###############################################################################
# With q = 0.1 cos(2 pi x), a is rescaled so a + b + int q = 1.

problem = NonlocalProblem.normalized(-1.0, QProfile.cos(0.1, 1))
spec = nonlocal_spectrum(problem, indices)
print("largest |Delta(lambda_j)|:", spec.residual.max())
for j in (0, 1, 2, 4, 8, 16, 32):
    k = indices.position((j,))
    print(f"j = {j:2d}: lambda = {spec.eigenvalues[k]:.10f}, |alpha_j| = {abs(spec.alpha[k]):.3e}")

###############################################################################
# The dual functions make a biorthogonal system.

grid = grid_for(1, indices.radius)
print("biorthogonality defect:", verify_system(problem, indices, grid).biorthogonality_defect)
