"""Deterministic identification over Gaussian and fading channels.

The package splits into construction (``galois``, ``rs``, ``codebook``,
``packing``), channel simulation (``fading``, ``channel``), verification
(``decoder``), rate analysis (``bounds``), and the experiment harness
(``harness``).  Everything here is importable straight from the top
level; the ``dicode`` console script fronts the same machinery.
"""

from .bounds import (
    RateReport,
    di_rate,
    inv_norm_cdf,
    min_distance_lower_bound,
    rate_report,
    shannon_ergodic_capacity,
    shannon_outage_capacity,
    sphere_packing_rate,
)
from .channel import Awgn, FastFading, SlowFading, parse_channel, transmit
from .codebook import (
    AmplitudeAlphabet,
    ConcatCodebook,
    ConcatParams,
    codeword_stats,
    encode_identity,
    export_codewords_csv,
    guaranteed_distance,
    load_params_json,
    plan_params,
    write_params_json,
)
from .decoder import (
    ACCEPT,
    OUTAGE,
    REJECT,
    CsiFast,
    CsiSlow,
    DecisionStatistic,
    NoCsi,
    impostor_moments,
    nocsi_threshold,
    threshold_csi,
    verify_csi_fast,
    verify_csi_slow,
    verify_nocsi,
)
from .errors import DegenerateFadingError, InfeasibleError, QuadratureError, ValidationFailure
from .fading import (
    Constant,
    DiscreteMixture,
    FadingMoments,
    Nakagami,
    Rayleigh,
    Rician,
    parse_distribution,
    quantile_abs,
)
from .galois import FieldContext, ExtensionContext, field_arith, make_extension, make_field
from .harness import (
    ArrayCodebook,
    ExperimentConfig,
    MomentGridConfig,
    MomentReport,
    TrialReport,
    build_codebook,
    moment_validation,
    run_experiment,
    wilson_interval,
    write_text_atomic,
)
from .packing import (
    PROFILES,
    ExpurgationReport,
    PackingSpec,
    ProjectionReport,
    check_projection_property,
    generate_expurgated,
    verify_packing,
)
from .rs import RSCode, rs_encode, rs_min_distance

__version__ = "0.1.0"

__all__ = [
    "ACCEPT",
    "OUTAGE",
    "PROFILES",
    "REJECT",
    "AmplitudeAlphabet",
    "ArrayCodebook",
    "Awgn",
    "ConcatCodebook",
    "ConcatParams",
    "Constant",
    "CsiFast",
    "CsiSlow",
    "DecisionStatistic",
    "DegenerateFadingError",
    "DiscreteMixture",
    "ExperimentConfig",
    "ExpurgationReport",
    "ExtensionContext",
    "FadingMoments",
    "FastFading",
    "FieldContext",
    "InfeasibleError",
    "MomentGridConfig",
    "MomentReport",
    "Nakagami",
    "NoCsi",
    "PackingSpec",
    "ProjectionReport",
    "QuadratureError",
    "RSCode",
    "RateReport",
    "Rayleigh",
    "Rician",
    "SlowFading",
    "TrialReport",
    "ValidationFailure",
    "build_codebook",
    "check_projection_property",
    "codeword_stats",
    "di_rate",
    "encode_identity",
    "export_codewords_csv",
    "field_arith",
    "generate_expurgated",
    "guaranteed_distance",
    "impostor_moments",
    "inv_norm_cdf",
    "load_params_json",
    "make_extension",
    "make_field",
    "min_distance_lower_bound",
    "moment_validation",
    "nocsi_threshold",
    "parse_channel",
    "parse_distribution",
    "plan_params",
    "quantile_abs",
    "rate_report",
    "rs_encode",
    "rs_min_distance",
    "run_experiment",
    "shannon_ergodic_capacity",
    "shannon_outage_capacity",
    "sphere_packing_rate",
    "threshold_csi",
    "transmit",
    "verify_csi_fast",
    "verify_csi_slow",
    "verify_nocsi",
    "verify_packing",
    "wilson_interval",
    "write_params_json",
    "write_text_atomic",
]
