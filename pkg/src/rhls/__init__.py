"""Numerical verification of the reversed HLS inequality with extended kernel
on the upper half-space."""
from .errors import *  # noqa: F401,F403
from .indices import ExponentSet, ConformalIndices, derive_exponents, conformal_indices, pohozaev_relation
from .quadrature import QuadratureConfig, IntegralResult

__all__ = ["ExponentSet", "ConformalIndices", "derive_exponents", "conformal_indices",
           "pohozaev_relation", "QuadratureConfig", "IntegralResult"]
