"""Exception hierarchy shared by the optimizers, problems and the CLI."""


class SbOptError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(SbOptError, ValueError):
    """Invalid bounds, budgets or experiment configuration."""

    exit_code = 2


class NumericalFailure(SbOptError, ArithmeticError):
    """A surrogate could not be fitted or optimized.

    When raised from inside an optimization run, ``partial_log`` holds the
    records gathered before the failure.
    """

    exit_code = 3

    def __init__(self, message, partial_log=None):
        super().__init__(message)
        self.partial_log = partial_log


class EvaluationFailure(SbOptError, RuntimeError):
    """The objective could not be evaluated (external command failed)."""

    exit_code = 4

    def __init__(self, message, output="", partial_log=None):
        super().__init__(message)
        self.output = output
        self.partial_log = partial_log


class TsplibError(SbOptError, ValueError):
    """Structured TSPLIB parse error carrying the offending line number."""

    exit_code = 2

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MissingDimensionError(TsplibError):
    pass


class UnsupportedFeatureError(TsplibError):
    pass


class TokenCountError(TsplibError):
    pass


class NonNumericTokenError(TsplibError):
    pass
