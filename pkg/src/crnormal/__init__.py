"""Exact normal forms for real hypersurfaces ``Im w = phi(z, zbar, Re w)``.

The package computes, weight by weight and in exact Gaussian-rational
arithmetic, the unique fg-normalized formal map taking a hypersurface jet into
a chosen normal form.
"""
from .errors import InternalInvariantError, NonUniquenessError, ValidationError
from .hypersurface import (
    HypersurfaceJet,
    MapJet,
    a_automorphism,
    apply_map,
    apply_map_by_inversion,
    check_transformation_identity,
    compose,
    invert,
    is_fg_normalized,
    is_linear_normalized,
    levi_diagnostic,
    quadric,
    r_automorphism,
    validate_hypersurface,
)
from .normalform import (
    PRESETS,
    LineChoice,
    NormalFormSpec,
    check,
    choice_determinant,
    custom_spec,
    preset,
    validate_choice,
)
from .oracle import normalize_oracle
from .scalars import GaussianRational
from .series import HoloSeries, PuSeries, Signature, invert_parametrization, substitute
from .solver import eliminate_harmonics, normalize
from .trace import trace, trace_decompose, trace_decompose_oracle, trace_power

__version__ = "0.1.0"

__all__ = [
    "ValidationError",
    "InternalInvariantError",
    "NonUniquenessError",
    "GaussianRational",
    "Signature",
    "PuSeries",
    "HoloSeries",
    "substitute",
    "invert_parametrization",
    "trace",
    "trace_power",
    "trace_decompose",
    "trace_decompose_oracle",
    "HypersurfaceJet",
    "MapJet",
    "validate_hypersurface",
    "quadric",
    "apply_map",
    "apply_map_by_inversion",
    "check_transformation_identity",
    "compose",
    "invert",
    "is_fg_normalized",
    "is_linear_normalized",
    "r_automorphism",
    "a_automorphism",
    "levi_diagnostic",
    "PRESETS",
    "LineChoice",
    "NormalFormSpec",
    "preset",
    "custom_spec",
    "validate_choice",
    "choice_determinant",
    "check",
    "normalize",
    "normalize_oracle",
    "eliminate_harmonics",
]
