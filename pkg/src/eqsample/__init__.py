"""Hyperparameter-free entropy-equilibrium truncation sampling.

Converts raw logits into sorted distributions, picks candidate sets where
normalized entropy balances probability mass (plus the usual comparison
rules: top-k, top-p, min-p, eta, typical, mirostat), samples deterministically
from a seeded stream, replays logit traces from disk, and scores generated
sequences for n-gram diversity.
"""

from .baselines import (
    BaselineConfig,
    MirostatState,
    PRESET_GRIDS,
    apply_truncation,
    truncate_eta,
    truncate_min_p,
    truncate_mirostat,
    truncate_top_k,
    truncate_top_p,
    truncate_typical,
)
from .dist import (
    SortedDistribution,
    distribution_from_logits,
    sort_descending,
    temperature_softmax,
)
from .equilibrium import (
    EQUILIBRIUM_SLACK,
    TrajectoryPoint,
    TruncationResult,
    incremental_entropy_update,
    normalized_entropy,
    objective_curve,
    probability_mass,
    select_threshold,
    select_threshold_naive,
    subset_entropy,
)
from .engine import (
    GenerationResult,
    GenerationSession,
    StepRecord,
    SyntheticSource,
    TraceSource,
    generate,
    sample_from_candidates,
    step_once,
)
from .errors import (
    CorruptTraceError,
    DegenerateInputError,
    EqsampleError,
    GenerationAborted,
    InvalidParameterError,
    TraceFormatError,
)
from .metrics import diversity, rep_n
from .rng import SplitMix64, uniform_at, uint64_at
from .traceio import LogitTrace, read_trace, write_results, write_trace

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig",
    "CorruptTraceError",
    "DegenerateInputError",
    "EQUILIBRIUM_SLACK",
    "EqsampleError",
    "GenerationAborted",
    "GenerationResult",
    "GenerationSession",
    "InvalidParameterError",
    "LogitTrace",
    "MirostatState",
    "PRESET_GRIDS",
    "SortedDistribution",
    "SplitMix64",
    "StepRecord",
    "SyntheticSource",
    "TraceFormatError",
    "TraceSource",
    "TrajectoryPoint",
    "TruncationResult",
    "apply_truncation",
    "distribution_from_logits",
    "diversity",
    "generate",
    "incremental_entropy_update",
    "normalized_entropy",
    "objective_curve",
    "probability_mass",
    "read_trace",
    "rep_n",
    "sample_from_candidates",
    "select_threshold",
    "select_threshold_naive",
    "sort_descending",
    "step_once",
    "subset_entropy",
    "temperature_softmax",
    "truncate_eta",
    "truncate_min_p",
    "truncate_mirostat",
    "truncate_top_k",
    "truncate_top_p",
    "truncate_typical",
    "uint64_at",
    "uniform_at",
    "write_results",
    "write_trace",
]
