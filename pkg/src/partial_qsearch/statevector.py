"""Dense brute-force simulator over all N item amplitudes.

Slow, memory-bound and deliberately naive: it exists to certify the
three-class engine in :mod:`partial_qsearch.core`. Items are laid out in
contiguous blocks, item ``i`` belonging to block ``i // b``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    PHASE_INITIAL,
    PHASE_LOCAL,
    ReducedState,
    RunTrace,
    Schedule,
    SearchSpace,
    schedule_phases,
)

DEFAULT_CAP = 2**14


class NotClassUniform(ValueError):
    """The dense state is not constant on the three symmetry classes."""


class CapExceeded(ValueError):
    """The database is too large for the dense simulator."""


@dataclass(frozen=True, eq=False)
class StateVector:
    amps: np.ndarray
    space: SearchSpace

    def __post_init__(self) -> None:
        self.amps.setflags(write=False)

    def norm_squared(self) -> float:
        return float(self.amps @ self.amps)


def _check_cap(space: SearchSpace, cap: int) -> None:
    if space.n_items > cap:
        raise CapExceeded(
            f"n_items={space.n_items} exceeds statevector cap {cap}"
        )


def sv_uniform(space: SearchSpace, cap: int = DEFAULT_CAP) -> StateVector:
    _check_cap(space, cap)
    n = space.n_items
    return StateVector(np.full(n, 1.0 / np.sqrt(n)), space)


def sv_oracle(sv: StateVector) -> StateVector:
    amps = sv.amps.copy()
    amps[sv.space.target_index] *= -1.0
    return StateVector(amps, sv.space)


def sv_global_diffusion(sv: StateVector) -> StateVector:
    return StateVector(2.0 * sv.amps.mean() - sv.amps, sv.space)


def sv_local_diffusion(sv: StateVector) -> StateVector:
    blocks = sv.amps.reshape(sv.space.n_blocks, sv.space.block_size)
    out = 2.0 * blocks.mean(axis=1, keepdims=True) - blocks
    return StateVector(out.reshape(-1), sv.space)


def sv_global_grover_step(sv: StateVector) -> StateVector:
    return sv_global_diffusion(sv_oracle(sv))


def sv_local_grover_step(sv: StateVector) -> StateVector:
    return sv_local_diffusion(sv_oracle(sv))


def _class_masks(space: SearchSpace) -> tuple[np.ndarray, np.ndarray]:
    block_of = np.arange(space.n_items) // space.block_size
    in_block = block_of == space.target_block
    in_block[space.target_index] = False
    outside = block_of != space.target_block
    return in_block, outside


def reduce(sv: StateVector, atol: float = 1e-10) -> ReducedState:
    """Project a class-uniform dense state onto (t, u, v).

    Raises NotClassUniform if amplitudes within a class differ by more than
    ``atol``.
    """
    space = sv.space
    in_block, outside = _class_masks(space)
    values = []
    for name, mask in (("target block", in_block), ("outside", outside)):
        cls = sv.amps[mask]
        if cls.size == 0:
            values.append(0.0)
            continue
        spread = float(cls.max() - cls.min())
        if spread > atol:
            raise NotClassUniform(f"{name} amplitudes spread by {spread:.3e}")
        values.append(float(cls.mean()))
    return ReducedState(float(sv.amps[space.target_index]), values[0], values[1], space)


def expand(state: ReducedState) -> np.ndarray:
    """Dense amplitude vector described by a reduced state."""
    space = state.space
    in_block, outside = _class_masks(space)
    amps = np.empty(space.n_items)
    amps[space.target_index] = state.amp_target
    amps[in_block] = state.amp_block
    amps[outside] = state.amp_outside
    return amps


def sv_run(space: SearchSpace, schedule: Schedule, cap: int = DEFAULT_CAP) -> list[StateVector]:
    """Dense states, initial state first, after every step of ``schedule``."""
    sv = sv_uniform(space, cap)
    out = [sv]
    for phase in schedule_phases(schedule):
        sv = sv_local_grover_step(sv) if phase == PHASE_LOCAL else sv_global_grover_step(sv)
        out.append(sv)
    return out


def sv_partial_search(
    space: SearchSpace, schedule: Schedule, cap: int = DEFAULT_CAP
) -> RunTrace:
    """Dense-engine counterpart of :func:`partial_qsearch.core.partial_search`."""
    return trace_from_dense(schedule, sv_run(space, schedule, cap))


def trace_from_dense(schedule: Schedule, dense: list[StateVector]) -> RunTrace:
    states = tuple(reduce(sv) for sv in dense)
    phases = (PHASE_INITIAL, *schedule_phases(schedule))
    return RunTrace(dense[0].space, schedule, phases, states, engine="statevector")
