"""
Hilbert-Schmidt norms from kernels and from symbols
===================================================

The Hilbert-Schmidt norm of a multiplier can be computed from its kernel on
the grid square or from a convolution-weighted sum over the symbol.  In the
periodic case both coincide with the plain l^2 norm of the symbol.  With a
nontrivial twist they differ: the convolution sum measures the periodised
kernel, not the kernel itself.
"""
import math


from nhkit import IndexSet, SeparatedProblem, grid_for, hs_norm_kernel, hs_norm_symbol, kernel_of
from nhkit.symbols import delta

for h in (1.0, math.e):
    problem = SeparatedProblem((h,))
    indices = IndexSet(1, 6)
    grid = grid_for(1, indices.radius)
    sigma = delta(indices)
    kernel = hs_norm_kernel(kernel_of(sigma, problem, indices, grid))
    rep = hs_norm_symbol(sigma, problem, indices, grid)
    print(f"h = {h:.4f}: kernel path {kernel:.12f}, convolution path {rep.convolution:.12f}, "
          f"plain {rep.plain:.3f}, sandwich {rep.sandwich_holds}")

###############################################################################
# For h = e the exact values are sinh(1) and sqrt((e^2 - 1) / 2).

print("sinh(1) =", math.sinh(1.0), " sqrt((e^2 - 1)/2) =", math.sqrt((math.e**2 - 1) / 2))

###############################################################################
# The convolution sum truncated at |xi| <= 2N + 1 converges like 1/N.

problem = SeparatedProblem((math.e,))
for radius in (4, 8, 16, 32):
    indices = IndexSet(1, radius)
    rep = hs_norm_symbol(delta(indices), problem, indices, grid_for(1, 2))
    print(f"N = {radius:2d}: truncated {rep.convolution_truncated:.10f}, tail {rep.tail:.2e}")
