"""snslab: a Fourier-space laboratory for singular Navier-Stokes solutions.

Builds and verifies, on a truncated periodic Fourier lattice standing in for
R^3: the exact Slezkin-Landau jet family and its flux constant kappa(c),
moving-singularity solutions of the forced heat equation, Picard solutions of
the mild Navier-Stokes formulation with a Dirac force traveling along a
Hoelder curve, pressure recovery, and numerical certificates for the
pseudo-measure-space inequalities the construction rests on.
"""

__version__ = "0.1.0"

from .curves import Curve, constant_curve, linear_curve, power_curve
from .errors import (
    ConfigError,
    DivergedIterate,
    DomainError,
    ExponentOutOfRange,
    LatticeMismatch,
    NonHermitianInput,
    NotConverged,
    OriginEvaluation,
    QuadratureNotConverged,
    SmallnessViolated,
    SnslabError,
    StencilTooCloseToOrigin,
    SupportIntersectsCurve,
)
from .spectral import (
    FourierLattice,
    PhysicalField,
    SpectralField,
    boundary_decay,
    dealiased_product,
    divergence_defect,
    forward_transform,
    inverse_transform,
    leray_project,
    read_field,
    spectral_derivative,
    spectral_divergence,
    write_field,
)

__all__ = [
    "__version__",
    "Curve",
    "constant_curve",
    "linear_curve",
    "power_curve",
    "FourierLattice",
    "SpectralField",
    "PhysicalField",
    "forward_transform",
    "inverse_transform",
    "dealiased_product",
    "leray_project",
    "spectral_derivative",
    "spectral_divergence",
    "divergence_defect",
    "boundary_decay",
    "write_field",
    "read_field",
    "SnslabError",
    "NonHermitianInput",
    "LatticeMismatch",
    "OriginEvaluation",
    "DomainError",
    "StencilTooCloseToOrigin",
    "QuadratureNotConverged",
    "ExponentOutOfRange",
    "SupportIntersectsCurve",
    "NotConverged",
    "DivergedIterate",
    "SmallnessViolated",
    "ConfigError",
]
