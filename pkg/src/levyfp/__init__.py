"""Exact sampling of first-passage events for subordinators and
bounded-variation Levy processes, by embedding into tractable carriers."""

from .engine import (
    first_jump_cp,
    sample_id,
    sample_interval_exit,
    sample_level_crossing,
    sample_subordinator_fpe,
)
from .errors import (
    ConfigError,
    DegenerateSampleError,
    GuardTripError,
    LevyFpError,
    LowAcceptanceWarning,
    ParameterError,
    RootBracketError,
    UnsupportedModelError,
)
from .events import BVExitEvent, CrossingDraw, FirstPassageEvent, IterationTrace
from .gamma_carrier import GammaCarrier
from .mixture_carrier import MixtureCarrier
from .models import (
    CallbackBoundary,
    ConstantBoundary,
    DensityPart,
    EMPTY_MEASURE,
    FiniteMeasure,
    LinearBoundary,
    PiecewiseLinearBoundary,
    TiltedTruncatedModel,
    UnitConversion,
    boundary_shift,
    cap_boundary,
    id_moments,
    reduce_gamma_model,
    tempered_mixture_model,
)
from .oracle import (
    TruncationScheme,
    eval_fpt_cdf,
    ks_one_sample,
    ks_two_sample,
    moment_check,
    oracle_fpe,
    oracle_interval_exit,
    oracle_level_crossing,
    small_jump_mean,
)
from .rng import RngStream
from .stable import StableIntegrand, sample_standard_stable, standard_intensity
from .stable_carrier import StableCarrier

__version__ = "0.1.0"

__all__ = [
    "BVExitEvent",
    "CallbackBoundary",
    "ConfigError",
    "ConstantBoundary",
    "CrossingDraw",
    "DegenerateSampleError",
    "DensityPart",
    "EMPTY_MEASURE",
    "FiniteMeasure",
    "FirstPassageEvent",
    "GammaCarrier",
    "GuardTripError",
    "IterationTrace",
    "LevyFpError",
    "LinearBoundary",
    "LowAcceptanceWarning",
    "MixtureCarrier",
    "ParameterError",
    "PiecewiseLinearBoundary",
    "RngStream",
    "RootBracketError",
    "StableCarrier",
    "StableIntegrand",
    "TiltedTruncatedModel",
    "TruncationScheme",
    "UnitConversion",
    "UnsupportedModelError",
    "boundary_shift",
    "cap_boundary",
    "eval_fpt_cdf",
    "first_jump_cp",
    "id_moments",
    "ks_one_sample",
    "ks_two_sample",
    "moment_check",
    "oracle_fpe",
    "oracle_interval_exit",
    "oracle_level_crossing",
    "reduce_gamma_model",
    "sample_id",
    "sample_interval_exit",
    "sample_level_crossing",
    "sample_standard_stable",
    "sample_subordinator_fpe",
    "small_jump_mean",
    "standard_intensity",
    "tempered_mixture_model",
]
