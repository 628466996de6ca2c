"""Measures of scalability for unit-norm frames."""
from .core import UnitNormFrame, random_unit_frame, validate_frame
from .conedist import solve_cone_projection
from .mvee import frame_from_ellipsoid, john_certificate, minimal_ellipsoid
from .scalemeasures import analyze, approximate_scalable, is_scalable_2d_exact, minimax_coherence

__version__ = "0.1.0"

__all__ = [
    "UnitNormFrame",
    "random_unit_frame",
    "validate_frame",
    "solve_cone_projection",
    "minimal_ellipsoid",
    "john_certificate",
    "frame_from_ellipsoid",
    "analyze",
    "approximate_scalable",
    "is_scalable_2d_exact",
    "minimax_coherence",
]
