"""Exception and warning types raised across the package."""


class LookaheadError(LookupError):
    """A predictable computation tried to read data that is not yet revealed."""


class NumericalError(ArithmeticError):
    """A numerical routine (quadrature, series, continued fraction) failed to converge."""


class QuadratureError(NumericalError):
    pass


class AdapterError(RuntimeError):
    """An external compressor failed or reported something that is not a byte count."""


class ConfigError(ValueError):
    """Invalid run configuration (CLI, model or constructor spec)."""


class DataError(ValueError):
    """Malformed input data file."""


class NullSupportWarning(RuntimeWarning):
    """An observation has zero density under the null, so the capital jumps to +inf."""


class ReplicationError(RuntimeError):
    """A Monte Carlo replication failed; ``index`` is its replication number.

    The original exception is chained as ``__cause__``.
    """

    def __init__(self, index, cause):
        super().__init__(f"replication {index} failed: {type(cause).__name__}: {cause}")
        self.index = index
