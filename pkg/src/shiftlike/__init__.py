"""Dissipative composition operators, weighted backward shifts and their supercyclicity criteria."""

from .correspondence import (
    NuMeasure,
    factor_map,
    nu_from_weights,
    semiconjugacy_residual,
    weights_from_profile,
    weights_roundtrip_check,
)
from .criteria import (
    CriterionVerdict,
    ShiftVerdict,
    Status,
    WitnessTriple,
    build_transitivity_witness,
    dissipative_product_sequence,
    dissipative_verdict,
    equivalence_identity_check,
    general_condition_search,
    invertible_simplified_products,
    shift_product_sequence,
    shift_supercyclicity_verdict,
    sufficient_condition_check,
    verify_witness,
)
from .errors import (
    ConfigError,
    EpsilonTooLarge,
    NonIntegrableDensity,
    NotFound,
    OutOfRange,
    WeightOutOfRange,
    ZeroDensity,
    ZeroVector,
)
from .operator_core import (
    CompositionOperator,
    LambdaMode,
    SeqVector,
    ShiftOperator,
    StepFunction,
    WeightSequence,
    apply_backward_shift,
    apply_composition,
    apply_inverse_shift,
    lp_norm_seq,
    lp_norm_step,
    projective_distance,
)
from .system_model import (
    DensityLineSystem,
    DensityPiece,
    DistortionReport,
    ExtensionRule,
    MeasureProfile,
    distortion_scan,
    profile_from_density,
    profile_mass,
)

__version__ = "0.1.0"
