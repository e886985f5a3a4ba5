"""Exact GMM estimation with nonsmooth moments and variance-decay experiments."""

__version__ = "0.1.0"

from .moments import Family, MomentSpec, QuadratureRule
from .gmm import (
    GmmFit,
    WeightKind,
    WeightMatrix,
    WeightScheme,
    build_weight,
    criterion,
    fit_one_step,
    fit_two_step,
)
from .sampling import Dataset, SeedSpec, gen_ivqr, gen_location, mvn_sample

__all__ = [
    "__version__",
    "Family",
    "MomentSpec",
    "QuadratureRule",
    "GmmFit",
    "WeightKind",
    "WeightMatrix",
    "WeightScheme",
    "build_weight",
    "criterion",
    "fit_one_step",
    "fit_two_step",
    "Dataset",
    "SeedSpec",
    "gen_ivqr",
    "gen_location",
    "mvn_sample",
]
