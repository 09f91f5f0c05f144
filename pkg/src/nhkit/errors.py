"""Exception hierarchy for nhkit."""


class NHKitError(Exception):
    """Base class for all errors raised by nhkit."""


class InvalidArgumentError(NHKitError, ValueError):
    """A parameter is outside its admissible range.

    ``field`` names the offending parameter.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class GridMismatchError(NHKitError, ValueError):
    """Two sampled functions (or a function and an operator) live on different grids."""


class WrongVariantError(NHKitError, TypeError):
    """An operation was requested for a problem variant that does not support it."""


class RootNotFoundError(NHKitError, ArithmeticError):
    """Newton and Muller iterations both failed to locate a zero of the characteristic function."""

    def __init__(self, seed, last, residual):
        self.seed = seed
        self.last = last
        self.residual = residual
        super().__init__(
            f"no root found from seed {seed!r}; last iterate {last!r} with |Delta| = {residual:.3e}"
        )


class MultiplicityError(NHKitError, ArithmeticError):
    """A multiple eigenvalue was detected; generalized eigenfunctions are not supported."""

    def __init__(self, index, lam, derivative):
        self.index = index
        self.lam = lam
        self.derivative = derivative
        super().__init__(
            f"eigenvalue {lam!r} at index {index} looks multiple (|Delta'| = {abs(derivative):.3e})"
        )


class InconsistentEigenpairError(NHKitError, ArithmeticError):
    """The sampled pair (u, v) fails the biorthogonality self-check on the given grid."""


class WZViolationError(NHKitError, ArithmeticError):
    """An eigenfunction is (numerically) zero at a grid node, so the symbol cannot be formed."""

    def __init__(self, index, node, value):
        self.index = index
        self.node = node
        self.value = value
        super().__init__(f"|u_xi| = {abs(value):.3e} at node {node} for xi = {index}")


class SingularResolventError(NHKitError, ZeroDivisionError):
    """1 - lambda_xi vanishes for some index in the truncation."""

    def __init__(self, index):
        self.index = index
        super().__init__(f"1 - lambda_xi = 0 at xi = {index}")


class EigensolverError(NHKitError, ArithmeticError):
    """The dense eigenvalue solver did not converge."""


class ConfigError(NHKitError, ValueError):
    """An experiment configuration failed validation.  ``path`` is the dotted field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")
