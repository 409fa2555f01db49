"""Exception types raised by the simulator"""

from typing import Optional


class UsageError(ValueError):
    """Invalid arguments: size mismatch, unknown kind, non-self-adjoint input"""


class RangeError(UsageError):
    """Argument outside its admissible interval"""


class CapabilityError(RuntimeError):
    """Requested size exceeds what a dense or exhaustive routine supports"""


class SingularityError(ArithmeticError):
    """Closed-form expression with a vanishing denominator"""


class SingularAnsatzError(ArithmeticError):
    """Ansatz basis is linearly dependent under the Hilbert-Schmidt product"""

    def __init__(self, message: str, rank: int):
        super().__init__(f"{message} (rank {rank})")
        self.rank = rank


class ConvergenceError(RuntimeError):
    """Iterative eigensolver did not converge"""

    def __init__(self, message: str, residual: Optional[float] = None):
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class StiffIntegrationError(RuntimeError):
    """Adaptive integrator step size underflowed"""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance"""


class NoDriveError(ArithmeticError):
    """Counterdiabatic drive vanishes identically, optimum undefined"""


class ConfigError(ValueError):
    """Invalid experiment configuration"""
