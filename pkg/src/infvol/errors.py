"""Exception types shared across the package."""


class InfvolError(Exception):
    """Base class for all package errors."""


class StructuralError(InfvolError):
    """Operands do not fit together (variable tables, shapes, dimensions)."""


class UsageError(InfvolError):
    """An operation was called outside its supported regime."""


class ValidationError(InfvolError):
    """Input data failed validation (metric, polynomial text, ...)."""


class ConfigError(InfvolError):
    """A run configuration could not be parsed or validated."""
