"""Exception types raised by emscale."""


class SingularPointError(ValueError):
    """Field requested exactly on a charged magnet surface or edge."""


class QuadratureError(RuntimeError):
    """Adaptive flux quadrature did not converge."""


class InfeasibleDesignError(ValueError):
    """No buildable coil / load combination exists for the problem."""


class IntegrationDivergedError(RuntimeError):
    """Time-domain integration produced a non-finite state."""


class ConfigError(ValueError):
    """Malformed or out-of-range run configuration."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"{key}: "
        super().__init__(prefix + message)
