"""Exception and warning types shared across the package."""


class LevyFpError(Exception):
    """Base class for all package errors."""


class ParameterError(LevyFpError, ValueError):
    """A sampler or evaluator was called with out-of-range arguments."""


class ConfigError(LevyFpError, ValueError):
    """A model/boundary/engine combination violates a documented contract."""


class UnsupportedModelError(LevyFpError):
    """The requested computation is not available for this model form."""


class RootBracketError(LevyFpError, RuntimeError):
    """A monotone root could not be bracketed within the expansion budget."""


class GuardTripError(LevyFpError, RuntimeError):
    """The engine's iteration guard tripped; carries diagnostic state.

    The sampling loops terminate with probability one, so this error points
    at a defective model/boundary combination or a numerical degeneracy.
    """

    def __init__(self, message, iterations, trace_tail=None):
        super().__init__(message)
        self.iterations = iterations
        self.trace_tail = list(trace_tail) if trace_tail is not None else []


class DegenerateSampleError(LevyFpError, ValueError):
    """A statistical test received a constant (zero-spread) sample."""


class LowAcceptanceWarning(UserWarning):
    """A rejection loop's estimated acceptance probability fell below 1e-6.

    The draw that is eventually returned is still exact; the warning only
    flags runtime cost.
    """
