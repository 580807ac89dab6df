"""Exception hierarchy shared by all subpackages."""


class NoGapsError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(NoGapsError, ValueError):
    """An input object violates its declared invariants.

    The offending field is available as ``field``.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ParameterError(NoGapsError, ValueError):
    """A numeric parameter is outside the admissible range."""


class ShapeError(NoGapsError, ValueError):
    """Matrix or vector dimensions do not fit the operation."""


class NormalizationError(NoGapsError, ValueError):
    """A vector that must have unit norm does not."""


class BudgetError(NoGapsError, RuntimeError):
    """An exhaustive computation would exceed its enumeration budget."""


class PreconditionError(NoGapsError, ValueError):
    """A premise of an audited statement does not hold for the given data."""


class NumericError(NoGapsError, ArithmeticError):
    """An iterative numerical method failed.

    ``residual`` holds the best residual reached and ``partial`` any partial
    results worth keeping (for example eigenvalues that did converge).
    """

    def __init__(self, message: str, residual: float = float("nan"), partial=None):
        self.residual = residual
        self.partial = partial
        super().__init__(message)


class SingularityError(NumericError):
    """A matrix that must have full column rank is numerically rank deficient."""


class ConfigError(NoGapsError, ValueError):
    """An experiment configuration fails schema validation.

    ``path`` is the dotted location of the offending entry, for example
    ``parameters.epsilon``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
