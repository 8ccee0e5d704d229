"""Exception hierarchy shared across the package."""


class SnslabError(Exception):
    """Base class for all package-specific errors."""


class NonHermitianInput(SnslabError):
    """Spectral field violates Hermitian symmetry beyond tolerance."""


class LatticeMismatch(SnslabError):
    """Operands live on different Fourier lattices."""


class OriginEvaluation(SnslabError):
    """Closed-form evaluation requested at the singular point x = 0."""


class DomainError(SnslabError):
    """Parameter outside the admissible domain (e.g. |c| <= 1)."""


class StencilTooCloseToOrigin(SnslabError):
    """Finite-difference stencil would straddle the singularity."""


class QuadratureNotConverged(SnslabError):
    """Adaptive quadrature failed to meet its refinement tolerance."""


class ExponentOutOfRange(SnslabError):
    """Norm/inequality exponent outside the admissible interval."""


class SupportIntersectsCurve(SnslabError):
    """Test-function support touches the singular curve."""


class NotConverged(SnslabError):
    """Fixed-point iteration hit the iteration cap before tolerance."""


class DivergedIterate(SnslabError):
    """Fixed-point iterate escaped the admissible ball."""


class SmallnessViolated(SnslabError):
    """Measured smallness precondition for the fixed point fails."""


class ConfigError(SnslabError):
    """Invalid run configuration; message carries the precise locus."""
