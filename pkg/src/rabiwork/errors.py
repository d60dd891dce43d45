"""Exception types shared across the package."""


class RabiworkError(Exception):
    """Base class for all package errors."""


class ConfigError(RabiworkError):
    """Invalid configuration or constructor argument."""


class TruncationError(RabiworkError):
    """Fock-space truncation cannot represent the requested state or run."""


class StateError(RabiworkError):
    """A quantum state violated one of its physicality invariants."""


class PhysicsAuditError(RabiworkError):
    """A trajectory failed one of the built-in physics audits."""


class NumericalCorruptionError(RabiworkError):
    """An observable that must be real acquired a large imaginary part."""
