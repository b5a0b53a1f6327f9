"""Exception types shared across the toolkit."""


class ConfigError(ValueError):
    """Bad configuration file: parse failure or an invariant violation."""


class CoverageError(ValueError):
    """A query or mission window falls outside the current field's grid."""


class InfeasibleError(RuntimeError):
    """A transition, plan, or design violates the operating constraints."""


class NumericalError(RuntimeError):
    """Numerical failure: ill-conditioned mass matrix, gimbal lock, bad FD step."""
