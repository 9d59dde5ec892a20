"""Ansatz composition: alternating phase-shift and mixer layers."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .grid import ObjectiveTable, SolutionGrid
from .mixers import (
    CirculantGraph,
    MomentumGrid,
    hypercube_mixer,
    phase_shift,
    qaoa_complete_mixer,
    qmoa_mixer,
    qowe_mixer,
)
from .states import (
    StateVector,
    WavepacketSpec,
    expectation,
    gaussian_wavepacket,
    grid_superposition,
)


class Algorithm(enum.Enum):
    QMOA = "qmoa"
    QAOA_COMPLETE = "qaoa_complete"
    QAOA_HYPERCUBE = "qaoa_hypercube"
    QOWE = "qowe"


@dataclass(frozen=True)
class AnsatzSpec:
    """One variational algorithm configuration.

    ``graphs`` supplies the per-dimension circulant graphs (QMOA only).
    ``shared_walk_time`` collapses the QMOA walk times to one parameter per
    layer instead of one per dimension. ``initial_state`` is either the
    string "equal" or a WavepacketSpec.
    """

    algorithm: Algorithm
    depth: int
    graphs: tuple[CirculantGraph, ...] | None = None
    shared_walk_time: bool = False
    initial_state: str | WavepacketSpec = "equal"

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("ansatz depth must be >= 1")
        if self.algorithm is Algorithm.QMOA and self.graphs is None:
            raise ValueError("QMOA needs one circulant graph per dimension")
        if self.algorithm is not Algorithm.QMOA and self.graphs is not None:
            raise ValueError("only QMOA takes mixing graphs")
        if isinstance(self.initial_state, str) and self.initial_state != "equal":
            raise ValueError(
                f"initial_state must be 'equal' or a WavepacketSpec, got {self.initial_state!r}"
            )

    def walk_times_per_layer(self, dims: int) -> int:
        if self.algorithm in (Algorithm.QAOA_COMPLETE, Algorithm.QAOA_HYPERCUBE):
            return 1
        if self.algorithm is Algorithm.QMOA and self.shared_walk_time:
            return 1
        return dims

    def params_per_layer(self, dims: int) -> int:
        return 1 + self.walk_times_per_layer(dims)

    def total_params(self, dims: int) -> int:
        return self.depth * self.params_per_layer(dims)

    def at_depth(self, depth: int) -> "AnsatzSpec":
        return replace(self, depth=depth)

    def with_initial_state(self, initial_state) -> "AnsatzSpec":
        return replace(self, initial_state=initial_state)


@dataclass
class ParameterVector:
    """Layer-major variational parameters: gamma then walk time(s) per layer."""

    gammas: np.ndarray
    walk_times: np.ndarray

    def __post_init__(self) -> None:
        self.gammas = np.atleast_1d(np.asarray(self.gammas, dtype=float))
        self.walk_times = np.atleast_2d(np.asarray(self.walk_times, dtype=float))
        if self.walk_times.shape[0] != self.gammas.size:
            raise ValueError("one walk-time row per layer required")
        if not (np.all(np.isfinite(self.gammas)) and np.all(np.isfinite(self.walk_times))):
            raise ValueError("parameters must be finite")

    @property
    def depth(self) -> int:
        return self.gammas.size

    def flatten(self) -> np.ndarray:
        return np.hstack([self.gammas[:, None], self.walk_times]).ravel()

    @classmethod
    def unflatten(cls, flat: np.ndarray, depth: int, times_per_layer: int) -> "ParameterVector":
        flat = np.asarray(flat, dtype=float)
        expected = depth * (1 + times_per_layer)
        if flat.size != expected:
            raise ValueError(f"expected {expected} parameters, got {flat.size}")
        table = flat.reshape(depth, 1 + times_per_layer)
        return cls(table[:, 0].copy(), table[:, 1:].copy())

    def matches(self, spec: AnsatzSpec, dims: int) -> bool:
        return (
            self.depth == spec.depth
            and self.walk_times.shape[1] == spec.walk_times_per_layer(dims)
        )


def initial_state(spec: AnsatzSpec, grid: SolutionGrid) -> StateVector:
    if isinstance(spec.initial_state, WavepacketSpec):
        return gaussian_wavepacket(grid, spec.initial_state)
    return grid_superposition(grid)


def apply_ansatz(
    spec: AnsatzSpec,
    params: ParameterVector,
    table: ObjectiveTable,
    grid: SolutionGrid,
    drift_log: list[float] | None = None,
) -> StateVector:
    """Prepare |t, gamma>: initial state, then p phase-shift/mixer layers.

    Norm drift is checked after every layer; drifts beyond the renormalise
    threshold are corrected (and logged by the state). Pass ``drift_log`` to
    collect the per-layer drifts seen before any correction.
    """
    if not params.matches(spec, grid.dims):
        raise ValueError(
            f"parameter layout {params.walk_times.shape} does not match "
            f"{spec.algorithm.value} at depth {spec.depth} in D={grid.dims}"
        )
    if table.values.size != grid.total_points:
        raise ValueError("objective table does not match the grid")
    state = initial_state(spec, grid)
    momentum = (
        MomentumGrid.from_grid(grid) if spec.algorithm is Algorithm.QOWE else None
    )
    dims = grid.dims
    for layer in range(spec.depth):
        state = phase_shift(state, float(params.gammas[layer]), table)
        times = params.walk_times[layer]
        if spec.algorithm is Algorithm.QMOA:
            expanded = np.repeat(times, dims) if spec.shared_walk_time else times
            state = qmoa_mixer(state, expanded, spec.graphs)
        elif spec.algorithm is Algorithm.QAOA_COMPLETE:
            state = qaoa_complete_mixer(state, float(times[0]))
        elif spec.algorithm is Algorithm.QAOA_HYPERCUBE:
            state = hypercube_mixer(state, float(times[0]))
        else:
            state = qowe_mixer(state, times, momentum, grid)
        if drift_log is not None:
            drift_log.append(state.norm_drift())
        state = state.renormalised()
    return state


def objective_value(
    spec: AnsatzSpec,
    params: ParameterVector,
    table: ObjectiveTable,
    grid: SolutionGrid,
) -> float:
    """<Q> of the prepared ansatz state; the quantity the optimiser minimises."""
    return expectation(apply_ansatz(spec, params, table, grid), table)
