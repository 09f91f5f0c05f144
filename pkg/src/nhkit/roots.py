"""Complex root polishing for entire functions: Newton with a Muller fallback."""
import cmath

import numpy as np

from .errors import RootNotFoundError

__all__ = ["newton", "muller", "polish_root"]


def newton(f, df, z0, tol=1e-12, maxiter=50):
    """Newton iteration on a complex analytic function.

    Returns ``(z, converged, history)``; ``history`` holds the residual
    moduli.  Stops early (unconverged) on a vanishing derivative or when the
    residual has failed to decrease for three consecutive steps.
    """
    z = complex(z0)
    fz = f(z)
    history = [abs(fz)]
    stalled = 0
    for _ in range(maxiter):
        if abs(fz) <= tol:
            return z, True, history
        d = df(z)
        if d == 0 or not cmath.isfinite(d):
            break
        z = z - fz / d
        fz = f(z)
        if not cmath.isfinite(fz):
            break
        if abs(fz) >= history[-1]:
            stalled += 1
            if stalled >= 3:
                history.append(abs(fz))
                break
        else:
            stalled = 0
        history.append(abs(fz))
    return z, abs(fz) <= tol, history


def muller(f, z0, z1, z2, tol=1e-12, maxiter=100):
    """Muller's method from three starting points.  Returns ``(z, converged)``."""
    f0, f1, f2 = f(z0), f(z1), f(z2)
    for _ in range(maxiter):
        if abs(f2) <= tol:
            return z2, True
        h1, h2 = z1 - z0, z2 - z1
        if h1 == 0 or h2 == 0:
            break
        d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
        a = (d2 - d1) / (h2 + h1)
        b = a * h2 + d2
        disc = cmath.sqrt(b * b - 4.0 * f2 * a)
        den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
        if den == 0:
            break
        z3 = z2 - 2.0 * f2 / den
        z0, z1, z2 = z1, z2, z3
        f0, f1, f2 = f1, f2, f(z3)
        if not cmath.isfinite(f2):
            break
    return z2, abs(f2) <= tol


def polish_root(f, df, seed, tol=1e-12, maxiter=50):
    """Newton from ``seed``; on failure, Muller seeded around the best Newton iterate.

    Raises
    ------
    RootNotFoundError
        If neither method reaches ``|f| <= tol``.
    """
    z, ok, history = newton(f, df, seed, tol=tol, maxiter=maxiter)
    if ok:
        return z
    start = z if np.isfinite(history[-1]) and history[-1] < history[0] else complex(seed)
    step = 1e-3 * max(1.0, abs(start))
    zm, ok = muller(f, start - step, start + step, start, tol=tol)
    if ok:
        return zm
    last = zm if cmath.isfinite(zm) else z
    raise RootNotFoundError(complex(seed), last, abs(f(last)) if cmath.isfinite(last) else float("inf"))
