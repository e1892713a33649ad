"""Sup-convolution laboratory: polytopes, means, layered functions and inequality checks."""

from .estimates import Budget, IntegrationResult
from .kernels import BACKEND as KERNEL_BACKEND
from .means import MeanSpec, WeightVector, eval_mean, holder_complement, holder_exponent
from .polytope import DirectionSet, Polytope, affine_combination, lp_combination, volume
from .stepfn import LayeredFunction, ProfileSpec, from_profile

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "IntegrationResult",
    "KERNEL_BACKEND",
    "MeanSpec",
    "WeightVector",
    "eval_mean",
    "holder_exponent",
    "holder_complement",
    "Polytope",
    "DirectionSet",
    "affine_combination",
    "lp_combination",
    "volume",
    "LayeredFunction",
    "ProfileSpec",
    "from_profile",
]
