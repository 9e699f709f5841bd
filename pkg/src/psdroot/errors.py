"""Exception and warning types shared across the package."""


class NotPositiveDefiniteError(ValueError):
    """A matrix required to be positive definite is not (Cholesky failed)."""


class IndefiniteInputError(ValueError):
    """Eigenvalues are negative beyond the tolerated round-off band."""


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes."""


class ConvergenceFailureError(RuntimeError):
    """A direct factorization (eigensolver, correction sweep) did not converge."""


class DivergenceError(RuntimeError):
    """An iteration blew up (residual grew by more than a factor of 1e6)."""


class SingularIterateError(RuntimeError):
    """An iterate that must stay invertible became numerically singular."""


class DomainError(ValueError):
    """A scalar parameter is outside its admissible range."""


class ParseError(ValueError):
    """A matrix spec string does not follow the grammar."""


class SchemaError(ValueError):
    """A results file does not match the expected column layout."""


class MatrixMarketError(ValueError):
    """A Matrix Market file is malformed."""


class OverflowWarning(UserWarning):
    """Integer entries exceed the range floats represent exactly."""
