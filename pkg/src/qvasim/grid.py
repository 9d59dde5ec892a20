"""Discretised search domains and tabulated objective values.

A solution grid covers a rectangular domain with ``N`` points per dimension
(both endpoints on-grid) and addresses the ``K = N**D`` points with a single
vectorised index ``k`` in which dimension 0 varies fastest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

DEFAULT_QUBIT_CAP = 26


class GridError(ValueError):
    """Raised for invalid grid geometry or indexing requests."""


@dataclass(frozen=True)
class SolutionGrid:
    """Tensor grid over a rectangular domain, endpoints inclusive."""

    dims: int
    points_per_dim: int
    lower: np.ndarray
    upper: np.ndarray
    spacing: np.ndarray

    @property
    def total_points(self) -> int:
        return self.points_per_dim**self.dims

    @property
    def qubits(self) -> int:
        return self.dims * int(np.log2(self.points_per_dim))

    @property
    def tensor_shape(self) -> tuple[int, ...]:
        return (self.points_per_dim,) * self.dims

    def axis_coords(self, dim: int) -> np.ndarray:
        """Coordinate values along one dimension, ``x_d = lower_d + n * dx_d``.

        The final point is pinned to the upper bound so both declared
        endpoints are on-grid bit-exactly.
        """
        if not 0 <= dim < self.dims:
            raise GridError(f"dimension {dim} out of range for D={self.dims}")
        coords = self.lower[dim] + np.arange(self.points_per_dim) * self.spacing[dim]
        coords[-1] = self.upper[dim]
        return coords

    def coordinate_columns(self) -> np.ndarray:
        """Per-dimension coordinate of every grid point, shape (D, K).

        Column k holds the coordinates of point k; dimension 0 occupies the
        least-significant base-N digits of k.
        """
        n = self.points_per_dim
        k_total = self.total_points
        cols = np.empty((self.dims, k_total))
        for d in range(self.dims):
            axis = self.axis_coords(d)
            reps_inner = n**d
            reps_outer = k_total // (reps_inner * n)
            cols[d] = np.tile(np.repeat(axis, reps_inner), reps_outer)
        return cols


def make_grid(
    lower: Sequence[float],
    upper: Sequence[float],
    n_points: int,
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> SolutionGrid:
    """Build an inclusive-endpoint grid with ``n_points`` per dimension.

    ``n_points`` must be a power of two (the grid is addressed by qubits) and
    the total register size ``D * log2(N)`` must not exceed ``qubit_cap``.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
        raise GridError("lower and upper must be equal-length non-empty vectors")
    if np.any(upper <= lower):
        bad = int(np.argmax(upper <= lower))
        raise GridError(
            f"inverted bounds in dimension {bad}: "
            f"[{lower[bad]}, {upper[bad]}] has upper <= lower"
        )
    if n_points < 2 or n_points & (n_points - 1) != 0:
        raise GridError(f"points per dimension must be a power of two >= 2, got {n_points}")
    dims = lower.size
    qubits = dims * int(np.log2(n_points))
    if qubits > qubit_cap:
        raise GridError(
            f"grid needs {qubits} qubits (D={dims}, N={n_points}), "
            f"exceeding the cap of {qubit_cap}; raise qubit_cap to override"
        )
    spacing = (upper - lower) / (n_points - 1)
    return SolutionGrid(dims, n_points, lower, upper, spacing)


def index_to_coords(grid: SolutionGrid, k: int) -> np.ndarray:
    """Coordinates of grid point ``k``; dimension 0 varies fastest."""
    if not 0 <= k < grid.total_points:
        raise GridError(f"index {k} out of range for K={grid.total_points}")
    n = grid.points_per_dim
    rem = int(k)
    out = np.empty(grid.dims)
    for d in range(grid.dims):
        out[d] = grid.axis_coords(d)[rem % n]
        rem //= n
    return out


def coords_to_index(grid: SolutionGrid, coords: Sequence[float]) -> int:
    """Vectorised index of the grid point with the given coordinates."""
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (grid.dims,):
        raise GridError(f"expected {grid.dims} coordinates, got shape {coords.shape}")
    digits = np.rint((coords - grid.lower) / grid.spacing).astype(int)
    if np.any(digits < 0) or np.any(digits >= grid.points_per_dim):
        raise GridError(f"coordinates {coords} lie outside the grid")
    n = grid.points_per_dim
    k = 0
    for d in range(grid.dims - 1, -1, -1):
        k = k * n + int(digits[d])
    return k


@dataclass(frozen=True)
class ObjectiveTable:
    """Objective values over a grid plus ranking metadata.

    ``unique_sorted_values`` deduplicates with exact floating-point equality;
    ``rank_of`` maps a value to its 1-based rank among those unique values.
    """

    values: np.ndarray
    min_value: float
    max_value: float
    argmin_index: int
    unique_sorted_values: np.ndarray = field(repr=False)

    @property
    def n_unique(self) -> int:
        return self.unique_sorted_values.size

    def rank_of(self, value: float) -> int:
        pos = int(np.searchsorted(self.unique_sorted_values, value))
        if pos >= self.n_unique or self.unique_sorted_values[pos] != value:
            raise KeyError(f"value {value!r} is not an objective value of this table")
        return pos + 1


def build_objective(grid: SolutionGrid, fn: Callable) -> ObjectiveTable:
    """Evaluate ``fn`` on every grid point and collect ranking metadata.

    ``fn`` receives per-dimension coordinate columns of shape (D, K) and may
    return the full (K,) value vector; callables that only handle single
    points of shape (D,) are evaluated in a loop.
    """
    cols = grid.coordinate_columns()
    k_total = grid.total_points
    values = None
    try:
        out = np.asarray(fn(cols), dtype=float)
        if out.shape == (k_total,):
            values = out
    except Exception:
        values = None
    if values is None:
        values = np.fromiter(
            (float(fn(cols[:, k])) for k in range(k_total)), dtype=float, count=k_total
        )
    if not np.all(np.isfinite(values)):
        bad = int(np.argmin(np.isfinite(values)))
        raise ValueError(
            f"objective is not finite at grid point k={bad}, "
            f"x={index_to_coords(grid, bad)}"
        )
    argmin = int(np.argmin(values))  # np.argmin returns the smallest index on ties
    return ObjectiveTable(
        values=values,
        min_value=float(values[argmin]),
        max_value=float(np.max(values)),
        argmin_index=argmin,
        unique_sorted_values=np.unique(values),
    )


def table_from_values(values: Sequence[float]) -> ObjectiveTable:
    """Build a table directly from a value vector (oracle-style objectives)."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("values must be a non-empty vector")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    argmin = int(np.argmin(values))
    return ObjectiveTable(
        values=values,
        min_value=float(values[argmin]),
        max_value=float(np.max(values)),
        argmin_index=argmin,
        unique_sorted_values=np.unique(values),
    )


def objective_to_csv(table: ObjectiveTable, grid: SolutionGrid, path) -> None:
    """Write the table as CSV rows ``k, x_0, ..., x_{D-1}, f``."""
    cols = grid.coordinate_columns()
    header = "k," + ",".join(f"x{d}" for d in range(grid.dims)) + ",f"
    data = np.column_stack([np.arange(grid.total_points), cols.T, table.values])
    np.savetxt(path, data, delimiter=",", header=header, comments="")
