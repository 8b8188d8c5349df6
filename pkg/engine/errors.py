# engine/errors.py


class WorkbenchError(Exception):
    """Base class for every error the workbench raises on purpose."""


class ConfigError(WorkbenchError, ValueError):
    """Unreadable configuration or unknown configuration keys."""


class FieldError(WorkbenchError, ValueError):
    """Modulus is not a prime in [2, 251], or matrices over different fields met."""


class DimensionMismatch(WorkbenchError, ValueError):
    pass


class AlgebraError(WorkbenchError, ValueError):
    """Structure constants are inconsistent, or two objects live over different algebras."""


class ModuleError(WorkbenchError, ValueError):
    """Action matrices or maps do not respect the algebra structure."""


class BudgetExceeded(WorkbenchError):
    """A configured search budget ran out before a decision was reached."""

    def __init__(self, message: str, budget: str = ""):
        super().__init__(message)
        self.budget = budget


class UndecidedError(WorkbenchError):
    """A truncated resolution cannot decide the requested degree."""


class PreconditionError(WorkbenchError, ValueError):
    pass
