"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised when a simulation configuration is malformed or out of range."""


class CflError(RuntimeError):
    """Raised when an explicit transport step would violate its CFL bound.

    The offending step is refused; the caller's state is left untouched.
    """


class SolverError(RuntimeError):
    """Raised when an iterative solve fails to reach its residual target."""
