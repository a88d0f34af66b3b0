"""Exact and Monte Carlo laboratory for color-weighted urns and the
polynomially self-repelling walks they drive.

The package splits into weight families (:mod:`urnlab.weights`), the urn
chain and its samplers (:mod:`urnlab.urn`), the walk built on site urns
(:mod:`urnlab.walk`), exact dynamic-programming laws with truncation
certificates (:mod:`urnlab.oracle`), limit-theorem checks and replica
harness (:mod:`urnlab.stats`), and the CLI / verification battery
(:mod:`urnlab.cli`).
"""

__version__ = "0.1.0"

from . import oracle, rng, stats, urn, walk, weights
from .oracle import exact_after_n, exact_at_tau_blue, exact_tail, toth_identity_check
from .rng import RngStream
from .stats import (
    EstimateSummary,
    MomentAccumulator,
    RunContext,
    TheoremVerdict,
    streaming_moments,
)
from .urn import (
    UrnSpec,
    UrnState,
    discrepancy_at,
    draw_rubin,
    draw_sequential,
    drift_residual,
    step_prob_red,
    stop_after_draws,
    stop_at_blues,
    stop_at_reds,
)
from .walk import sample_walk, walk_path_prob
from .weights import (
    WeightFunction,
    constant_weights,
    odd_even_series,
    perturbed_power,
    specific_power,
    table_weights,
)

__all__ = [
    "__version__",
    "oracle",
    "rng",
    "stats",
    "urn",
    "walk",
    "weights",
    "EstimateSummary",
    "MomentAccumulator",
    "RngStream",
    "RunContext",
    "TheoremVerdict",
    "UrnSpec",
    "UrnState",
    "WeightFunction",
    "constant_weights",
    "discrepancy_at",
    "draw_rubin",
    "draw_sequential",
    "drift_residual",
    "exact_after_n",
    "exact_at_tau_blue",
    "exact_tail",
    "odd_even_series",
    "perturbed_power",
    "sample_walk",
    "specific_power",
    "step_prob_red",
    "stop_after_draws",
    "stop_at_blues",
    "stop_at_reds",
    "streaming_moments",
    "table_weights",
    "toth_identity_check",
    "walk_path_prob",
]
