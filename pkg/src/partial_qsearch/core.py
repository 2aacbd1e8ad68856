"""Exact partial-search dynamics on the three-class symmetric subspace.

Starting from the uniform superposition, every operator used by the
algorithm (target sign flip, global inversion about the mean, blockwise
inversion about the mean) treats items within each of three classes
identically:

* the target item (amplitude ``t``),
* the other ``b - 1`` items of the target block (each ``u``),
* the ``N - b`` items outside the target block (each ``v``).

So the full N-dimensional state is captured by three real numbers and the
evolution costs O(1) per step regardless of database size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

PHASE_INITIAL = "initial"
PHASE_GLOBAL = "global"
PHASE_LOCAL = "local"
PHASE_FINAL = "final"


class InvalidGeometry(ValueError):
    """Raised when block structure or target indices are inconsistent."""


@dataclass(frozen=True)
class SearchSpace:
    """A database of ``n_items`` split into ``n_blocks`` contiguous blocks.

    ``target_item`` is the index of the marked item *within* its block.
    """

    n_items: int
    n_blocks: int
    target_block: int = 0
    target_item: int = 0

    def __post_init__(self) -> None:
        if self.n_items < 1 or self.n_blocks < 1:
            raise InvalidGeometry("n_items and n_blocks must be positive")
        if self.n_items % self.n_blocks:
            raise InvalidGeometry("n_blocks must divide n_items")
        if not 0 <= self.target_block < self.n_blocks:
            raise InvalidGeometry(
                f"target_block {self.target_block} outside [0, {self.n_blocks})"
            )
        if not 0 <= self.target_item < self.block_size:
            raise InvalidGeometry(
                f"target_item {self.target_item} outside [0, {self.block_size})"
            )

    @property
    def block_size(self) -> int:
        return self.n_items // self.n_blocks

    @property
    def target_index(self) -> int:
        """Global item index of the target (contiguous block layout)."""
        return self.target_block * self.block_size + self.target_item

    def to_dict(self) -> dict:
        return {
            "n_items": self.n_items,
            "n_blocks": self.n_blocks,
            "block_size": self.block_size,
            "target_block": self.target_block,
            "target_item": self.target_item,
        }


@dataclass(frozen=True)
class Schedule:
    """Iteration counts for the three steps of partial search."""

    global_iters: int
    local_iters: int
    apply_final_step: bool = True

    def __post_init__(self) -> None:
        if self.global_iters < 0 or self.local_iters < 0:
            raise ValueError("iteration counts must be nonnegative")

    @property
    def query_count(self) -> int:
        return self.global_iters + self.local_iters + int(self.apply_final_step)

    def to_dict(self) -> dict:
        return {
            "global_iters": self.global_iters,
            "local_iters": self.local_iters,
            "apply_final_step": self.apply_final_step,
        }


@dataclass(frozen=True)
class ReducedState:
    """Amplitudes of the three item classes; see the module docstring."""

    amp_target: float
    amp_block: float
    amp_outside: float
    space: SearchSpace = field(repr=False)

    @property
    def n_block_others(self) -> int:
        return self.space.block_size - 1

    @property
    def n_outside(self) -> int:
        return self.space.n_items - self.space.block_size

    def norm_squared(self) -> float:
        return (
            self.amp_target**2
            + self.n_block_others * self.amp_block**2
            + self.n_outside * self.amp_outside**2
        )

    def block_sum(self) -> float:
        """Sum of amplitudes over the target block."""
        return self.amp_target + self.n_block_others * self.amp_block

    def total_sum(self) -> float:
        """Sum of amplitudes over all items."""
        return self.block_sum() + self.n_outside * self.amp_outside

    def mean(self) -> float:
        return self.total_sum() / self.space.n_items

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.amp_target, self.amp_block, self.amp_outside)

    def to_dict(self) -> dict:
        return {
            "amp_target": self.amp_target,
            "amp_block": self.amp_block,
            "amp_outside": self.amp_outside,
        }


def uniform_state(space: SearchSpace) -> ReducedState:
    a = 1.0 / math.sqrt(space.n_items)
    return ReducedState(a, a, a, space)


def basis_state(space: SearchSpace) -> ReducedState:
    """All amplitude on the target item."""
    return ReducedState(1.0, 0.0, 0.0, space)


def oracle(state: ReducedState) -> ReducedState:
    return ReducedState(-state.amp_target, state.amp_block, state.amp_outside, state.space)


def global_diffusion(state: ReducedState) -> ReducedState:
    """Inversion about the mean over all N items."""
    twice_mean = 2.0 * state.mean()
    return ReducedState(
        twice_mean - state.amp_target,
        twice_mean - state.amp_block,
        twice_mean - state.amp_outside,
        state.space,
    )


def local_diffusion(state: ReducedState) -> ReducedState:
    """Inversion about the mean inside every block independently.

    Non-target blocks are uniform at ``v``, which is a fixed point, so
    ``amp_outside`` is passed through untouched.
    """
    b = state.space.block_size
    if b == 1:
        return state
    twice_mean = 2.0 * state.block_sum() / b
    return ReducedState(
        twice_mean - state.amp_target,
        twice_mean - state.amp_block,
        state.amp_outside,
        state.space,
    )


def global_grover_step(state: ReducedState) -> ReducedState:
    return global_diffusion(oracle(state))


def local_grover_step(state: ReducedState) -> ReducedState:
    return local_diffusion(oracle(state))


def block_success_probability(state: ReducedState) -> float:
    """Probability that measuring the block register yields the target block."""
    return state.amp_target**2 + state.n_block_others * state.amp_block**2


def outside_mass(state: ReducedState) -> float:
    return state.n_outside * state.amp_outside**2


@dataclass(frozen=True)
class RunTrace:
    """State history of one partial-search run.

    ``states[0]`` is the initial uniform state; ``states[i]`` is the state
    after the i-th step, whose kind is ``phases[i]``.
    """

    space: SearchSpace
    schedule: Schedule
    phases: tuple[str, ...]
    states: tuple[ReducedState, ...]
    engine: str = "reduced"

    @property
    def final_state(self) -> ReducedState:
        return self.states[-1]

    @property
    def pre_final_state(self) -> ReducedState:
        """State at the end of Step 2, before the final iteration."""
        s = self.schedule
        return self.states[s.global_iters + s.local_iters]

    @property
    def query_count(self) -> int:
        return self.schedule.query_count

    @property
    def block_success_probability(self) -> float:
        return block_success_probability(self.final_state)

    @property
    def outside_mass(self) -> float:
        return outside_mass(self.final_state)

    def __iter__(self) -> Iterator[tuple[str, ReducedState]]:
        return iter(zip(self.phases, self.states))

    def to_dict(self) -> dict:
        return {
            "engine": self.engine,
            "space": self.space.to_dict(),
            "schedule": self.schedule.to_dict(),
            "query_count": self.query_count,
            "block_success_probability": self.block_success_probability,
            "outside_mass": self.outside_mass,
            "final_state": self.final_state.to_dict(),
            "steps": [
                {"step": i, "phase": phase, **st.to_dict()}
                for i, (phase, st) in enumerate(self)
            ],
        }


def schedule_phases(schedule: Schedule) -> list[str]:
    """Step kinds, in execution order, for ``schedule``."""
    phases = [PHASE_GLOBAL] * schedule.global_iters + [PHASE_LOCAL] * schedule.local_iters
    if schedule.apply_final_step:
        phases.append(PHASE_FINAL)
    return phases


def partial_search(space: SearchSpace, schedule: Schedule) -> RunTrace:
    """Run j1 global iterations, j2 local iterations, then an optional final
    global iteration, recording the state after every step."""
    state = uniform_state(space)
    phases = [PHASE_INITIAL]
    states = [state]
    for phase in schedule_phases(schedule):
        step = local_grover_step if phase == PHASE_LOCAL else global_grover_step
        state = step(state)
        phases.append(phase)
        states.append(state)
    return RunTrace(space, schedule, tuple(phases), tuple(states))
