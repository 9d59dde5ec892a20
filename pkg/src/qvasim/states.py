"""Statevectors over the solution grid: constructors, expectation, sampling."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .grid import ObjectiveTable, SolutionGrid

logger = logging.getLogger(__name__)

# Renormalise (and log) only past this drift; smaller deviations are left
# untouched so kernel bugs surface in the norm instead of being hidden.
RENORM_THRESHOLD = 1e-12


@dataclass
class StateVector:
    """K complex amplitudes with unit norm.

    ``tensor_shape`` records the (N, ..., N) layout used by dimension-wise
    transforms; dimension d of the grid is the (D-1-d)-th tensor axis, so the
    flat index k has dimension 0 in its least-significant base-N digits.
    """

    amplitudes: np.ndarray
    tensor_shape: tuple[int, ...]

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if self.amplitudes.size != int(np.prod(self.tensor_shape)):
            raise ValueError(
                f"{self.amplitudes.size} amplitudes do not fill shape {self.tensor_shape}"
            )

    @property
    def total_points(self) -> int:
        return self.amplitudes.size

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.tensor_shape)

    def probabilities(self) -> np.ndarray:
        return (self.amplitudes.real**2 + self.amplitudes.imag**2)

    def norm_drift(self) -> float:
        """|1 - sum of probabilities|."""
        return abs(1.0 - float(np.sum(self.probabilities())))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.tensor_shape)

    def renormalised(self) -> "StateVector":
        """Rescale to unit norm if drift exceeds the threshold (logged)."""
        drift = self.norm_drift()
        if drift <= RENORM_THRESHOLD:
            return self
        logger.warning("renormalising state with norm drift %.3e", drift)
        norm = np.sqrt(np.sum(self.probabilities()))
        return StateVector(self.amplitudes / norm, self.tensor_shape)


@dataclass(frozen=True)
class WavepacketSpec:
    """Centres and widths of a separable Gaussian initial state."""

    centres: np.ndarray
    widths: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "centres", np.atleast_1d(np.asarray(self.centres, float)))
        object.__setattr__(self, "widths", np.atleast_1d(np.asarray(self.widths, float)))
        if self.centres.shape != self.widths.shape:
            raise ValueError("centres and widths must have matching shapes")
        if np.any(self.widths <= 0):
            raise ValueError("wavepacket widths must be positive")


def equal_superposition(total_points: int, tensor_shape: tuple[int, ...] | None = None) -> StateVector:
    """Uniform real amplitudes 1/sqrt(K) over all K states."""
    if total_points < 1:
        raise ValueError("need at least one basis state")
    amps = np.full(total_points, 1.0 / np.sqrt(total_points), dtype=np.complex128)
    return StateVector(amps, tensor_shape or (total_points,))


def grid_superposition(grid: SolutionGrid) -> StateVector:
    return equal_superposition(grid.total_points, grid.tensor_shape)


def gaussian_wavepacket(grid: SolutionGrid, spec: WavepacketSpec) -> StateVector:
    """Normalised separable Gaussian over the grid, real positive amplitudes."""
    if spec.centres.shape != (grid.dims,):
        raise ValueError(
            f"wavepacket has {spec.centres.size} dimensions, grid has {grid.dims}"
        )
    amps = np.ones(grid.tensor_shape)
    for d in range(grid.dims):
        x = grid.axis_coords(d)
        profile = np.exp(-((x - spec.centres[d]) ** 2) / (2.0 * spec.widths[d] ** 2))
        shape = [1] * grid.dims
        shape[grid.dims - 1 - d] = grid.points_per_dim
        amps = amps * profile.reshape(shape)
    flat = amps.ravel()
    norm = np.sqrt(np.sum(flat**2))
    if norm == 0.0:
        raise ValueError("wavepacket underflowed to zero on this grid; widen sigma")
    return StateVector(flat / norm, grid.tensor_shape)


def expectation(state: StateVector, table: ObjectiveTable) -> float:
    """<Q> = sum_k f_k |amplitude_k|^2."""
    if table.values.size != state.total_points:
        raise ValueError(
            f"table has {table.values.size} values, state has {state.total_points}"
        )
    return float(np.dot(table.values, state.probabilities()))


def sample(state: StateVector, rng: np.random.Generator, shots: int) -> np.ndarray:
    """Draw ``shots`` i.i.d. basis-state indices from |amplitude|^2.

    Inverse-CDF sampling on the cumulative probability array: O(K) setup and
    O(log K) per shot, exact for the stored distribution.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    drift = state.norm_drift()
    if drift > 1e-8:
        raise ValueError(f"state is not normalised (norm drift {drift:.3e})")
    cdf = np.cumsum(state.probabilities())
    cdf[-1] = 1.0
    draws = rng.random(shots)
    return np.searchsorted(cdf, draws, side="right").astype(np.int64)


def state_to_csv(state: StateVector, path) -> None:
    """Write amplitudes as CSV rows ``k, re, im, probability``."""
    k = np.arange(state.total_points)
    data = np.column_stack(
        [k, state.amplitudes.real, state.amplitudes.imag, state.probabilities()]
    )
    np.savetxt(path, data, delimiter=",", header="k,re,im,probability", comments="")
