"""Closed-form predictions for partial search, checked against simulation.

The predictions are leading-order asymptotics in sqrt(b) or sqrt(N), so
every comparison carries O(1) absolute slack. Amplitude-sum errors are
scaled by the natural magnitude of the sum (sqrt(b) or sqrt(N)); with a
tolerance of ``3 / sqrt(scale)`` that is the same as three units of
absolute error.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import core
from .core import RunTrace, Schedule, SearchSpace

SQRT3_HALF = math.sqrt(3.0) / 2.0
# Queries saved per sqrt(b) relative to full search: sqrt(3)/2 - pi/6.
SAVINGS_COEFFICIENT = SQRT3_HALF - math.pi / 6.0
# Saving quoted for the earlier partial-search algorithm, per sqrt(b).
PRIOR_SAVINGS_COEFFICIENT = 0.33

OBSERVATION_SLACK = 3.0
ZEROING_RATIO_TOL = 0.2
ZEROING_LEAK_TOL = 0.05
SAVINGS_ABS_TOL = 2.0
SUCCESS_THRESHOLD = 0.99


class RawNegative(ValueError):
    """The global-step count formula is negative for this geometry."""


class Label(str, enum.Enum):
    OBSERVATION_A = "ObservationA"
    OBSERVATION_B = "ObservationB"
    ZEROING_C = "ZeroingC"
    QUERY_COUNT = "QueryCount"
    SAVINGS = "Savings"
    OPTIMAL_ETA = "OptimalEta"
    LOWER_BOUND = "LowerBound"


@dataclass(frozen=True)
class Prediction:
    label: Label
    predicted: float
    simulated: float | None
    abs_error: float
    rel_error: float
    tolerance: float
    passed: bool
    skipped: bool = False
    note: str = ""
    detail: dict = field(default_factory=dict)

    @classmethod
    def skip(cls, label: Label, note: str) -> "Prediction":
        nan = float("nan")
        return cls(label, nan, None, nan, nan, nan, passed=False, skipped=True, note=note)

    def to_dict(self) -> dict:
        def num(x):
            return None if x is None or math.isnan(x) else x

        return {
            "label": self.label.value,
            "predicted": num(self.predicted),
            "simulated": num(self.simulated),
            "abs_error": num(self.abs_error),
            "rel_error": num(self.rel_error),
            "tolerance": num(self.tolerance),
            "passed": self.passed,
            "skipped": self.skipped,
            "note": self.note,
            "detail": self.detail,
        }


def _round(x: float) -> int:
    return math.floor(x + 0.5)


# -- step counts ------------------------------------------------------------

def global_iters_raw(space: SearchSpace) -> float:
    return math.pi / 4 * math.sqrt(space.n_items) - math.sqrt(3 * space.block_size / 4)


def local_iters_raw(block_size: int) -> float:
    return math.pi / 6 * math.sqrt(block_size)


def paper_query_count(space: SearchSpace) -> float:
    """Real-valued total query count (pi/4)sqrt(N) - (sqrt(3/4) - pi/6)sqrt(b)."""
    return math.pi / 4 * math.sqrt(space.n_items) - SAVINGS_COEFFICIENT * math.sqrt(
        space.block_size
    )


@dataclass(frozen=True)
class CanonicalSchedule:
    schedule: Schedule
    global_raw: float
    local_raw: float
    query_raw: float

    @property
    def query_count(self) -> int:
        return self.schedule.query_count

    def to_dict(self) -> dict:
        return {
            **self.schedule.to_dict(),
            "global_raw": self.global_raw,
            "local_raw": self.local_raw,
            "query_raw": self.query_raw,
            "query_count": self.query_count,
        }


def canonical_schedule(space: SearchSpace) -> CanonicalSchedule:
    """Integer schedule whose total cost is the rounded real-valued total.

    The local count is rounded on its own; the global count takes whatever
    is left of the rounded total after the local iterations and the single
    final iteration. Rounding the two counts independently would drift up to
    two queries away from the real-valued total.
    """
    j1_raw = global_iters_raw(space)
    if j1_raw < 0:
        raise RawNegative(
            f"global iteration count {j1_raw:.4f} < 0 for N={space.n_items}, "
            f"b={space.block_size}"
        )
    j2_raw = local_iters_raw(space.block_size)
    q_raw = paper_query_count(space)
    j2 = _round(j2_raw)
    j1 = max(0, _round(q_raw) - j2 - 1)
    return CanonicalSchedule(Schedule(j1, j2, True), j1_raw, j2_raw, q_raw)


def query_count(schedule: Schedule) -> int:
    return schedule.query_count


def predicted_savings(block_size: float) -> float:
    return SAVINGS_COEFFICIENT * math.sqrt(block_size)


def full_search_queries(n_items: float) -> float:
    return math.pi / 4 * math.sqrt(n_items)


def lower_bound(space: SearchSpace) -> float:
    return math.pi / 4 * (math.sqrt(space.n_items) - math.sqrt(space.block_size))


# -- observation (a): scattering out of a single state ----------------------

def observation_a_predicted(block_size: int, eta: float) -> float:
    rb = math.sqrt(block_size)
    return rb * math.sin(2 * eta / rb)


def scattered_sum(block_size: int, eta: int) -> float:
    """Signed amplitude sum after ``eta`` iterations on a ``block_size``-item
    space that starts with all amplitude on the target.

    The sum turns negative after the first iteration.
    """
    state = core.basis_state(SearchSpace(block_size, 1))
    for _ in range(eta):
        state = core.global_grover_step(state)
    return state.total_sum()


def observation_a_simulated(block_size: int, eta: int) -> float:
    if block_size < 2:
        raise ValueError("block_size must be at least 2")
    if not 0 <= eta <= math.pi / 4 * math.sqrt(block_size):
        raise ValueError(f"eta={eta} outside [0, (pi/4)sqrt(b)]")
    return abs(scattered_sum(block_size, eta))


# -- observation (b): going into a state ------------------------------------

def full_search_iterations(n_items: int) -> int:
    return _round(full_search_queries(n_items))


def observation_b_predicted(n_items: int, eta: float) -> float:
    rn = math.sqrt(n_items)
    return rn * math.sin(2 * eta / rn)


def _stopped_early(n_items: int, eta: int) -> core.ReducedState:
    steps = full_search_iterations(n_items) - eta
    if eta < 0 or steps < 0:
        raise ValueError(f"eta={eta} outside [0, {full_search_iterations(n_items)}]")
    state = core.uniform_state(SearchSpace(n_items, 1))
    for _ in range(steps):
        state = core.global_grover_step(state)
    return state


def observation_b_simulated(n_items: int, eta: int) -> float:
    """Amplitude sum over all items when full search stops ``eta`` iterations
    short of round((pi/4)sqrt(N))."""
    return _stopped_early(n_items, eta).total_sum()


def observation_b_both(n_items: int, eta: int) -> tuple[float, float]:
    """Amplitude sum with the target counted as stored and with its sign
    flipped (the mid-iteration, post-query reading)."""
    state = _stopped_early(n_items, eta)
    return state.total_sum(), state.total_sum() - 2 * state.amp_target


def _scaled_prediction(label, predicted, simulated, scale, **extra) -> Prediction:
    abs_error = abs(simulated - predicted)
    root = math.sqrt(scale)
    rel_error = abs_error / root
    tol = OBSERVATION_SLACK / root
    return Prediction(label, predicted, simulated, abs_error, rel_error, tol, rel_error <= tol, **extra)


def check_observation_a(block_size: int, eta: int) -> Prediction:
    return _scaled_prediction(
        Label.OBSERVATION_A,
        observation_a_predicted(block_size, eta),
        observation_a_simulated(block_size, eta),
        block_size,
        detail={"block_size": block_size, "eta": eta, "signed_sum": scattered_sum(block_size, eta)},
    )


def check_observation_b(n_items: int, eta: int) -> Prediction:
    as_stored, flipped = observation_b_both(n_items, eta)
    return _scaled_prediction(
        Label.OBSERVATION_B,
        observation_b_predicted(n_items, eta),
        as_stored,
        n_items,
        detail={
            "n_items": n_items,
            "eta": eta,
            "small_angle_limit": 2.0 * eta,
            "sum_target_flipped": flipped,
        },
    )


# -- observation (c): zeroing ------------------------------------------------

def zeroing_ratio(trace: RunTrace) -> float:
    """v / (2 * mean) at entry to the final step, after its query."""
    entry = core.oracle(trace.pre_final_state)
    return entry.amp_outside / (2.0 * entry.mean())


def zeroing_check(
    trace: RunTrace,
    ratio_tol: float = ZEROING_RATIO_TOL,
    leak_tol: float = ZEROING_LEAK_TOL,
) -> Prediction:
    if not trace.schedule.apply_final_step:
        raise ValueError("zeroing check needs a run with the final step applied")
    ratio = zeroing_ratio(trace)
    leak = trace.outside_mass
    err = abs(ratio - 1.0)
    return Prediction(
        Label.ZEROING_C,
        predicted=1.0,
        simulated=ratio,
        abs_error=err,
        rel_error=err,
        tolerance=ratio_tol,
        passed=err <= ratio_tol and leak <= leak_tol,
        detail={"outside_mass": leak, "leak_tolerance": leak_tol},
    )


# -- optimum of the savings function ----------------------------------------

def savings_function(block_size: float, eta: float) -> float:
    """Net saving -eta + sqrt(b) sin(2 eta / sqrt(b)) from eta local iterations."""
    rb = math.sqrt(block_size)
    return -eta + rb * math.sin(2 * eta / rb)


@dataclass(frozen=True)
class OptimalEta:
    eta_star: float
    max_saving: float
    grid_argmax: int


def optimal_local_iterations(block_size: int, grid: Iterable[int] | None = None) -> OptimalEta:
    if grid is None:
        grid = range(0, math.ceil(math.pi / 4 * math.sqrt(block_size)) + 2)
    grid = list(grid)
    if not grid:
        raise ValueError("empty eta grid")
    eta_star = local_iters_raw(block_size)
    best = max(grid, key=lambda e: (savings_function(block_size, e), -e))
    return OptimalEta(eta_star, savings_function(block_size, eta_star), best)


def check_optimal_eta(block_size: int, grid: Iterable[int] | None = None) -> Prediction:
    opt = optimal_local_iterations(block_size, grid)
    err = abs(opt.eta_star - opt.grid_argmax)
    return Prediction(
        Label.OPTIMAL_ETA,
        opt.eta_star,
        float(opt.grid_argmax),
        err,
        err / opt.eta_star,
        1.0,
        err <= 1.0,
        detail={"max_saving": opt.max_saving, "closed_form_saving": predicted_savings(block_size)},
    )


@dataclass(frozen=True)
class ProfilePoint:
    eta: int
    best_j1: int
    probability: float
    measured_saving: float
    predicted_saving: float


def saving_profile(space: SearchSpace, etas: Iterable[int]) -> list[ProfilePoint]:
    """Measured saving versus local iteration count.

    For each ``eta`` the global count is the one maximising block success
    probability over ``0 .. round((pi/4) sqrt(N))``; the measured saving is
    full-search cost minus the resulting total query count.
    """
    full = full_search_queries(space.n_items)
    out = []
    for eta in etas:
        state = core.uniform_state(space)
        best_p, best_j1 = -1.0, 0
        for j1 in range(full_search_iterations(space.n_items) + 1):
            local = state
            for _ in range(eta):
                local = core.local_grover_step(local)
            p = core.block_success_probability(core.global_grover_step(local))
            if p > best_p:
                best_p, best_j1 = p, j1
            state = core.global_grover_step(state)
        out.append(
            ProfilePoint(
                eta,
                best_j1,
                best_p,
                full - (best_j1 + eta + 1),
                savings_function(space.block_size, eta),
            )
        )
    return out


# -- schedule sweeps ----------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    j1: int
    j2: int
    probability: float
    queries: int

    @property
    def schedule(self) -> Schedule:
        return Schedule(self.j1, self.j2, True)


@dataclass(frozen=True)
class SweepResult:
    space: SearchSpace
    grid: tuple[SweepPoint, ...]
    best_schedule: Schedule
    canonical_schedule: Schedule | None
    canonical_gap: int | None

    def cheapest(self, threshold: float = SUCCESS_THRESHOLD) -> SweepPoint | None:
        """Fewest-query grid point reaching ``threshold``, or None."""
        ok = [p for p in self.grid if p.probability >= threshold]
        if not ok:
            return None
        return min(ok, key=lambda p: (p.queries, -p.probability, p.j1))

    @property
    def best(self) -> SweepPoint:
        return _best_point(self.grid)

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "grid": [
                {"j1": p.j1, "j2": p.j2, "queries": p.queries, "probability": p.probability}
                for p in self.grid
            ],
            "best_schedule": self.best_schedule.to_dict(),
            "canonical_schedule": None
            if self.canonical_schedule is None
            else self.canonical_schedule.to_dict(),
            "canonical_gap": self.canonical_gap,
        }


def _best_point(grid: Sequence[SweepPoint]) -> SweepPoint:
    return max(grid, key=lambda p: (p.probability, -p.queries, -p.j1))


def sweep_schedules(
    space: SearchSpace, j1_range: Iterable[int], j2_range: Iterable[int]
) -> SweepResult:
    """Block success probability of every (j1, j2) pair, final step applied.

    Runs the same step sequence as :func:`core.partial_search`, sharing the
    global prefix across each row, so grid values match single runs exactly.
    Rows are ordered lexicographically by (j1, j2).
    """
    j1_values = sorted(set(j1_range))
    j2_values = sorted(set(j2_range))
    if not j1_values or not j2_values:
        raise ValueError("sweep ranges must be nonempty")
    if j1_values[0] < 0 or j2_values[0] < 0:
        raise ValueError("sweep ranges must be nonnegative")

    grid = []
    state = core.uniform_state(space)
    done = 0
    for j1 in j1_values:
        for _ in range(j1 - done):
            state = core.global_grover_step(state)
        done = j1
        local = state
        local_done = 0
        for j2 in j2_values:
            for _ in range(j2 - local_done):
                local = core.local_grover_step(local)
            local_done = j2
            final = core.global_grover_step(local)
            grid.append(
                SweepPoint(j1, j2, core.block_success_probability(final), j1 + j2 + 1)
            )

    best = _best_point(grid).schedule
    try:
        canon = canonical_schedule(space).schedule
    except RawNegative:
        canon, gap = None, None
    else:
        gap = max(abs(best.global_iters - canon.global_iters), abs(best.local_iters - canon.local_iters))
    return SweepResult(space, tuple(grid), best, canon, gap)


# -- everything at once ---------------------------------------------------------

def verify_all(space: SearchSpace, eta_grid: Iterable[int] | None = None) -> list[Prediction]:
    """Every prediction for one geometry, in a fixed order.

    Checks whose preconditions fail come back with ``skipped=True`` and a note.
    """
    n, b = space.n_items, space.block_size
    if eta_grid is not None:
        eta_grid = list(eta_grid)
        if not eta_grid:
            raise ValueError("empty eta grid")
    out: list[Prediction] = []

    try:
        canon = canonical_schedule(space)
    except RawNegative as exc:
        canon, canon_note = None, f"RawNegative: {exc}"
    else:
        canon_note = ""
    trace = core.partial_search(space, canon.schedule) if canon else None

    if b >= 2:
        eta_a = canon.schedule.local_iters if canon else _round(local_iters_raw(b))
        out.append(check_observation_a(b, eta_a))
    else:
        out.append(Prediction.skip(Label.OBSERVATION_A, "block_size < 2: no state to scatter into"))

    eta_b = min(4, full_search_iterations(n))
    out.append(check_observation_b(n, eta_b))

    if trace is None:
        out.append(Prediction.skip(Label.ZEROING_C, canon_note))
    elif b < 2:
        out.append(Prediction.skip(Label.ZEROING_C, "block_size < 2: local steps are query-only"))
    else:
        out.append(zeroing_check(trace))

    if canon is None:
        out.append(Prediction.skip(Label.QUERY_COUNT, canon_note))
        out.append(Prediction.skip(Label.SAVINGS, canon_note))
    else:
        q, q_raw = canon.query_count, canon.query_raw
        err = abs(q - q_raw)
        out.append(
            Prediction(
                Label.QUERY_COUNT, q_raw, float(q), err, err / q_raw, 0.5, err <= 0.5,
                detail=canon.to_dict(),
            )
        )
        predicted = predicted_savings(b)
        achieved = full_search_queries(n) - q
        err = abs(achieved - predicted)
        out.append(
            Prediction(
                Label.SAVINGS, predicted, achieved, err, err / math.sqrt(b),
                SAVINGS_ABS_TOL, err <= SAVINGS_ABS_TOL,
                detail={
                    "coefficient": SAVINGS_COEFFICIENT,
                    "achieved_coefficient": achieved / math.sqrt(b),
                    "prior_coefficient": PRIOR_SAVINGS_COEFFICIENT,
                    "block_success_probability": trace.block_success_probability,
                },
            )
        )

    out.append(check_optimal_eta(b, eta_grid))

    if canon is None:
        out.append(Prediction.skip(Label.LOWER_BOUND, canon_note))
    else:
        bound = lower_bound(space)
        q = canon.query_count
        shortfall = max(0.0, bound - q)
        out.append(
            Prediction(
                Label.LOWER_BOUND, bound, float(q), shortfall,
                shortfall / bound if bound else 0.0, 0.0, shortfall <= 0.0,
                detail={"slack": q - bound},
            )
        )
    return out
