"""Exception types raised by esnkit."""


class EsnError(Exception):
    """Base class for all library errors."""


class ArgumentError(EsnError, ValueError):
    """Invalid argument value or combination."""


class DimensionError(ArgumentError):
    """Array shapes are inconsistent."""


class ConvergenceError(EsnError, ArithmeticError):
    def __init__(self, message, last_estimate=float("nan")):
        super().__init__(f"{message} (last estimate {last_estimate!r})")
        self.last_estimate = last_estimate


class CannotRescaleError(EsnError, ArithmeticError):
    """Spectral radius is zero, so no scale factor reaches the target."""


class SingularSystemError(EsnError, ArithmeticError):
    """Unregularized normal equations are rank deficient."""


class NumericOverflowError(EsnError, FloatingPointError):
    def __init__(self, message, step):
        super().__init__(f"{message} at step {step}")
        self.step = step


class ModelFormatError(EsnError):
    def __init__(self, message, section):
        super().__init__(f"[{section}] {message}")
        self.section = section


class ConfigError(ArgumentError):
    def __init__(self, message, key=None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key
