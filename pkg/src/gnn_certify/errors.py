"""Exception hierarchy. The CLI maps these onto exit codes."""


class CertifyError(Exception):
    """Base class for all library errors."""

    exit_code = 3


class DomainError(CertifyError, ValueError):
    """Inputs outside the mathematical domain of an operation."""


class DeepBoundUnavailable(DomainError):
    """The activation admits none of the polynomial-control routes."""


class DegenerateVarianceError(DomainError):
    pass


class QuadratureError(DomainError):
    """Adaptive quadrature failed to converge (unsupported growth)."""


class ResourceLimitError(CertifyError):
    exit_code = 4
