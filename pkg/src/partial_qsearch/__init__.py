"""Simulation and verification tools for partial quantum search.

A database of N items is split into K blocks of b = N/K items; the search
only has to identify the block holding the marked item. Two engines are
provided: an exact three-amplitude engine that scales to any N
(:mod:`partial_qsearch.core`) and a dense brute-force engine for small N
(:mod:`partial_qsearch.statevector`). :mod:`partial_qsearch.analysis`
compares closed-form predictions with both.
"""

__version__ = "0.1.0"

from .core import (
    InvalidGeometry,
    ReducedState,
    RunTrace,
    Schedule,
    SearchSpace,
    block_success_probability,
    global_diffusion,
    global_grover_step,
    local_diffusion,
    local_grover_step,
    oracle,
    partial_search,
    uniform_state,
)
from .analysis import (
    Prediction,
    RawNegative,
    SweepResult,
    canonical_schedule,
    lower_bound,
    predicted_savings,
    sweep_schedules,
    verify_all,
)

__all__ = [
    "InvalidGeometry",
    "Prediction",
    "RawNegative",
    "ReducedState",
    "RunTrace",
    "Schedule",
    "SearchSpace",
    "SweepResult",
    "block_success_probability",
    "canonical_schedule",
    "global_diffusion",
    "global_grover_step",
    "local_diffusion",
    "local_grover_step",
    "lower_bound",
    "oracle",
    "partial_search",
    "predicted_savings",
    "sweep_schedules",
    "uniform_state",
    "verify_all",
]
