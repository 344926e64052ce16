"""Exception hierarchy shared by every qdyn module."""


class QdynError(Exception):
    """Base class for all library errors."""


class DomainError(QdynError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedModelError(QdynError, TypeError):
    """The operation is not defined for the given channel family."""


class SingularRateError(QdynError, ArithmeticError):
    """A time-local decay rate diverges at the requested time."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t!r})")
        self.t = t


class IntegrationError(QdynError, ArithmeticError):
    """The adaptive integrator could not advance past ``t``."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t={t!r})")
        self.t = t


class SingularIntermediateError(QdynError, ArithmeticError):
    """The map at the earlier time is not (well) invertible."""

    def __init__(self, message: str, s: float):
        super().__init__(f"{message} (s={s!r})")
        self.s = s


class ConfigError(QdynError, ValueError):
    """A run configuration is malformed or inconsistent."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class RunError(QdynError):
    """A computation inside a run failed; ``stage`` names the module."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
