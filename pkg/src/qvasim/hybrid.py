"""Sampling-based hybrid optimisation and its function-evaluation accounting.

The hybrid scheme tunes the complete-graph walk ansatz against an expectation
value *estimated* from measurement samples, then launches one continuous
simplex run from the best point of each sample set until the true minimum is
located to within epsilon. Costs are compared against plain random-restart
simplex search through the accounting identity

    fev_assisted = sample_size * (p + 1) * fev_qmoa + fev_nelder_mead
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import Algorithm, AnsatzSpec, ParameterVector, apply_ansatz
from .engine import GAMMA_RANGE, WALK_TIME_RANGE, OptimiserOptions, nelder_mead
from .functions import TestFunction, get_function
from .grid import ObjectiveTable, SolutionGrid, build_objective, make_grid
from .mixers import CirculantGraph
from .states import sample

DEFAULT_SAMPLE_SIZE = 30
DEFAULT_EPSILON = 1e-4


@dataclass(frozen=True)
class HybridAccounting:
    """Evaluation counts for one assisted run; the identity is enforced."""

    fev_qmoa: int
    fev_nelder_mead: int
    sample_size: int
    depth: int
    fev_assisted: int = 0
    speedup: float | None = None

    def __post_init__(self) -> None:
        expected = self.sample_size * (self.depth + 1) * self.fev_qmoa + self.fev_nelder_mead
        if self.fev_assisted == 0:
            object.__setattr__(self, "fev_assisted", expected)
        elif self.fev_assisted != expected:
            raise ValueError(
                f"inconsistent accounting: fev_assisted={self.fev_assisted}, "
                f"expected {expected}"
            )


@dataclass
class HybridRunResult:
    found_x: np.ndarray | None
    found_value: float | None
    success: bool
    accounting: HybridAccounting
    seeds_tried: int


def speedup(baseline_fev: int, accounting: HybridAccounting) -> float:
    """Classical-only evaluations per assisted evaluation."""
    if baseline_fev <= 0 or accounting.fev_assisted <= 0:
        raise ValueError("evaluation counts must be positive")
    return baseline_fev / accounting.fev_assisted


def _scipy_default_options(n_params: int) -> OptimiserOptions:
    # the cited simplex implementation's out-of-the-box settings
    return OptimiserOptions(
        max_iterations=200 * n_params,
        max_evaluations=200 * n_params,
        adaptive=False,
    )


def _counting(fn):
    count = [0]

    def wrapped(x):
        count[0] += 1
        return fn(x)

    return wrapped, count


def hybrid_optimise(
    function: str | TestFunction,
    dims: int,
    n_points: int,
    depth: int,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    grid: SolutionGrid | None = None,
    table: ObjectiveTable | None = None,
) -> HybridRunResult:
    """One assisted run: sampled-objective tuning, then seeded continuous search.

    Every expectation estimation draws ``sample_size`` indices from the
    prepared state, scores their mean objective value (one fev_qmoa), and
    records the sample minimum. After the variational optimisation converges,
    the recorded minima seed continuous Nelder-Mead runs in the order they
    were collected; the procedure stops at the first run reaching
    f <= f_min + epsilon.
    """
    f = get_function(function) if isinstance(function, str) else function
    if grid is None:
        lower, upper = f.domain(dims)
        grid = make_grid(lower, upper, n_points)
    if table is None:
        table = build_objective(grid, f.fn)
    rng = np.random.default_rng(seed)
    spec = AnsatzSpec(
        Algorithm.QMOA,
        depth,
        graphs=tuple(CirculantGraph.complete(n_points) for _ in range(dims)),
    )
    times_per_layer = spec.walk_times_per_layer(dims)
    coords = grid.coordinate_columns()

    sample_minima: list[np.ndarray] = []
    estimations = [0]

    def sampled_objective(flat: np.ndarray) -> float:
        estimations[0] += 1
        params = ParameterVector.unflatten(flat, depth, times_per_layer)
        state = apply_ansatz(spec, params, table, grid)
        ks = sample(state, rng, sample_size)
        values = table.values[ks]
        sample_minima.append(coords[:, ks[np.argmin(values)]].copy())
        return float(np.mean(values))

    n_params = depth * (1 + times_per_layer)
    x0 = ParameterVector(
        rng.uniform(*GAMMA_RANGE, size=depth),
        rng.uniform(*WALK_TIME_RANGE, size=(depth, times_per_layer)),
    ).flatten()
    nelder_mead(sampled_objective, x0, _scipy_default_options(n_params))
    fev_qmoa = estimations[0]

    threshold = f.known_minimum(dims) + epsilon
    counted_f, fev_nm = _counting(lambda x: float(f.fn(x)))
    found_x = None
    found_value = None
    seeds_tried = 0
    for start in sample_minima:
        seeds_tried += 1
        result = nelder_mead(counted_f, start, _scipy_default_options(dims))
        if result.value <= threshold:
            found_x = result.x
            found_value = result.value
            break
    accounting = HybridAccounting(
        fev_qmoa=fev_qmoa,
        fev_nelder_mead=fev_nm[0],
        sample_size=sample_size,
        depth=depth,
    )
    return HybridRunResult(
        found_x=found_x,
        found_value=found_value,
        success=found_x is not None,
        accounting=accounting,
        seeds_tried=seeds_tried,
    )


@dataclass
class BaselineResult:
    evaluations: int
    success: bool
    restarts: int
    found_x: np.ndarray | None


def classical_baseline(
    function: str | TestFunction,
    dims: int,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
    max_evaluations: int = 50_000_000,
) -> BaselineResult:
    """Repeated Nelder-Mead from uniform random starts until epsilon-success."""
    f = get_function(function) if isinstance(function, str) else function
    lower, upper = f.domain(dims)
    rng = np.random.default_rng(seed)
    threshold = f.known_minimum(dims) + epsilon
    counted_f, fev = _counting(lambda x: float(f.fn(x)))
    restarts = 0
    while fev[0] < max_evaluations:
        restarts += 1
        x0 = rng.uniform(lower, upper)
        result = nelder_mead(counted_f, x0, _scipy_default_options(dims))
        if result.value <= threshold:
            return BaselineResult(fev[0], True, restarts, result.x)
    return BaselineResult(fev[0], False, restarts, None)
