"""Exception hierarchy shared by all modules."""


class SpectralError(Exception):
    """Base class for all errors raised by :mod:`sspectral`."""


class DimensionMismatch(SpectralError, ValueError):
    """Raised when algebra dimensions or module sizes do not agree."""


class SingularOperator(SpectralError):
    """Raised when an operator cannot be inverted numerically."""


class SInSpectrum(SingularOperator):
    """Raised when ``Q_s[T]`` is singular, i.e. ``s`` lies in the S-spectrum."""


class EigenSolverError(SpectralError):
    """Raised when the dense eigenvalue iteration fails to converge."""


class DomainError(SpectralError, ValueError):
    """Raised when a slice function is evaluated outside its double sector."""


class FlavorMismatch(SpectralError, ValueError):
    """Raised when combining slice functions of incompatible flavors."""


class ZeroInSector(SpectralError, ValueError):
    """Raised when an intrinsic denominator vanishes in the closed sector."""


class NotSubmodule(SpectralError, ValueError):
    """Raised when a subspace is not stable under right Clifford multiplication."""


class SpectrumOutsideSector(SpectralError):
    """Raised when the S-spectrum is not strictly inside the double sector."""


class NonDecayingFunction(SpectralError, ValueError):
    """Raised when the contour calculus is given a function that does not decay."""


class QuadratureNotConverged(SpectralError):
    """Raised when contour quadrature hits its refinement ceiling."""


class NotInjective(SpectralError):
    """Raised when the regularized calculi are requested for a non-injective operator."""


class CertificationFailed(SpectralError):
    """Raised when the sampled resolvent bound does not certify bisectoriality."""


class UnclassifiedGrowth(SpectralError, ValueError):
    """Raised when a function carries no usable growth information."""


class ConfigError(SpectralError, ValueError):
    """Raised for invalid scenario configurations."""
