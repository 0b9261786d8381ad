"""Exception hierarchy shared by all modules."""


class AogError(Exception):
    """Base class for errors raised by this package."""


class CapacityError(AogError, ValueError):
    """Variable count outside the supported range for dense lattice tables."""


class ConfigError(AogError, ValueError):
    """Invalid parameters, missing files, or malformed input documents."""


class OracleError(AogError, RuntimeError):
    """The value oracle failed to produce v(x_S) for some mask."""

    def __init__(self, message: str, mask: int | None = None):
        if mask is not None:
            message = f"{message} (mask={mask})"
        super().__init__(message)
        self.mask = mask


class IntegrityError(AogError, ArithmeticError):
    """A numerical certificate (faithfulness, efficiency) did not hold."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message}: max residual {residual:.3e}")
        self.residual = residual
