"""Fourier extension estimates for paraboloids over prime fields."""

__version__ = "0.1.0"

from .field import PrimeContext, FPoint, dot, is_isotropic, isotropic_directions, legendre_symbol, null_sphere
from .paraboloid import ParaboloidSet, SlicedSupport, full_paraboloid, lift, project, slice_at
from .spectral import (ParaboloidFunction, SpatialFunction, extension, fourier_transform,
                       lq_norm_P, lq_norm_V, restrict)
from .energy import (additive_energy, classify_rectangles, energy_decomposition,
                     energy_report, mixed_energy, rectangle_triples)

__all__ = [
    "PrimeContext", "FPoint", "dot", "is_isotropic", "isotropic_directions", "legendre_symbol",
    "null_sphere", "ParaboloidSet", "SlicedSupport", "full_paraboloid", "lift", "project",
    "slice_at", "ParaboloidFunction", "SpatialFunction", "extension", "fourier_transform",
    "lq_norm_P", "lq_norm_V", "restrict", "additive_energy", "classify_rectangles",
    "energy_decomposition", "energy_report", "mixed_energy", "rectangle_triples",
]
