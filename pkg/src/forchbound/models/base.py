"""Base protocols and the error hierarchy shared by every forchbound subsystem."""

from enum import Enum
from typing import Optional, Protocol

from ..types.common import FloatArray


class Component(Enum):
    """Subsystems that raise errors; used to tag diagnostics."""

    CONSTITUTIVE = "constitutive"
    GRID = "grid_quadrature"
    HARNESS = "inequality_harness"
    SOLVER = "pde_solver"
    BOUNDS = "apriori_bounds"
    CLI = "cli_reporting"


class FluxLaw(Protocol):
    """Protocol for a pointwise flux nonlinearity evaluated site by site.

    A site is a grid cell or, inside the solver, a face carrying averaged
    coefficients. All arrays broadcast against the site axis.
    """

    @property
    def degeneracy(self) -> float:
        ...

    def g_values(self, s: FloatArray) -> FloatArray:
        """g(x, s) at every site."""
        ...

    def s_values(self, xi: FloatArray) -> FloatArray:
        """Unique s >= 0 with s * g(x, s) = xi at every site."""
        ...

    def k_values(self, xi: FloatArray) -> FloatArray:
        """K(x, xi) = 1 / g(x, s(x, xi)) at every site."""
        ...


class ForchboundError(Exception):
    """Base exception for forchbound errors."""

    exit_code = 1

    def __init__(
        self, message: str, component: str, cause: Optional[Exception] = None
    ):
        super().__init__(message)
        self.message = message
        self.component = component
        self.cause = cause


class ConfigError(ForchboundError):
    """Raised for malformed scenario files, unknown keys and bad field specs."""

    exit_code = 1


class AdmissibilityError(ConfigError):
    """Raised when an exponent or parameter condition is violated."""

    def __init__(
        self,
        message: str,
        component: str,
        condition: str,
        cause: Optional[Exception] = None,
    ):
        super().__init__(message, component, cause)
        self.condition = condition


class DegenerateFamilyError(ConfigError):
    """Raised when a calibration family carries no usable function."""

    pass


class ConstitutiveError(ForchboundError):
    """Raised for invalid Forchheimer laws or weight fields."""

    exit_code = 1


class QuadratureError(ForchboundError):
    """Raised when an integrand is not finite at some cell."""

    exit_code = 2

    def __init__(
        self,
        message: str,
        component: str,
        cell: Optional[tuple] = None,
        cause: Optional[Exception] = None,
    ):
        super().__init__(message, component, cause)
        self.cell = cell


class ConvergenceError(ForchboundError):
    """Raised when an iterative solve exhausts its budget."""

    exit_code = 2


class SolverError(ForchboundError):
    """Raised for time-integration failures."""

    exit_code = 2


class VerificationError(ForchboundError):
    """Raised when a numerical solution or harness run fails its certification."""

    exit_code = 3
