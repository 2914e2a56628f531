"""Bijections between bipartite quadrangulations and labeled one-face maps on any surface."""

from .errors import InputError, InternalInvariantViolated
from .forward_bijection import quad_to_unicellular
from .multipoint import DelayedSources, KRootedMap, ab_backward, ab_forward, lambda_multi, phi_multi
from .reverse_bijection import unicellular_to_quad
from .surface_core import SPHERE, EmbeddedMap, SurfaceType, UnicellularMap

__all__ = [
    "SPHERE",
    "DelayedSources",
    "EmbeddedMap",
    "InputError",
    "InternalInvariantViolated",
    "KRootedMap",
    "SurfaceType",
    "UnicellularMap",
    "ab_backward",
    "ab_forward",
    "lambda_multi",
    "phi_multi",
    "quad_to_unicellular",
    "unicellular_to_quad",
]
