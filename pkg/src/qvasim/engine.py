"""Classical outer optimisation: seeded repeats, warm starts, depth sweeps.

Protocol implemented here:

* each depth runs ``repeats`` independent Nelder-Mead optimisations;
* fresh walk times are drawn from U[0, 2*pi) and phase parameters from
  U[-2*pi, 2*pi); a warm start copies the previous depth's best parameters
  into the first p-1 layers;
* when a warm start is given, repeat 0 extends it with an identity layer
  (t = 0, gamma = 0) instead of a random draw, which makes the best value
  non-increasing in depth;
* the wavepacket-evolution algorithm is optimised inside expanding parameter
  bounds, growing by a factor of 1.2 whenever the optimum pins against a
  bound, up to a half-width of 2*pi.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import optimize as sciopt

from .ansatz import Algorithm, AnsatzSpec, ParameterVector, apply_ansatz
from .grid import ObjectiveTable, SolutionGrid
from .states import StateVector, WavepacketSpec, expectation

WALK_TIME_RANGE = (0.0, 2.0 * np.pi)
GAMMA_RANGE = (-2.0 * np.pi, 2.0 * np.pi)

# Wavepacket-evolution constants: hand-selected starting values, initial bound
# half-width, growth factor, terminal half-width, and the default width.
QOWE_T0 = 0.1
QOWE_GAMMA0 = 0.1
QOWE_INITIAL_HALFWIDTH = 0.1
QOWE_GROWTH = 1.2
QOWE_MAX_HALFWIDTH = 2.0 * np.pi
QOWE_SIGMA = 1.0 / np.sqrt(2.0)
BOUND_HIT_TOL = 1e-9


@dataclass
class OptimiserOptions:
    max_iterations: int = 1_000_000
    simplex_tolerance: float = 1e-4
    value_tolerance: float = 1e-4
    adaptive: bool = True
    bounds: np.ndarray | None = None
    max_evaluations: int | None = None

    def __post_init__(self) -> None:
        if self.simplex_tolerance <= 0 or self.value_tolerance <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class NelderMeadResult:
    x: np.ndarray
    value: float
    evaluations: int
    iterations: int


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    options: OptimiserOptions | None = None,
    trace_path=None,
) -> NelderMeadResult:
    """Simplex minimisation with the dimension-adaptive coefficient scheme.

    Terminates when both the simplex spread and the value spread fall below
    their tolerances, or at the iteration cap. With bounds set, evaluation
    points are clamped onto the boundary. ``trace_path`` appends one JSON
    line per iteration: iteration index, best value, parameter vector.
    """
    options = options or OptimiserOptions()
    x0 = np.asarray(x0, dtype=float)
    if not np.all(np.isfinite(x0)):
        raise ValueError("starting point must be finite")
    f0 = float(objective(np.clip(x0, *_bound_arrays(options.bounds)) if options.bounds is not None else x0))
    if not np.isfinite(f0):
        raise ValueError(f"objective is not finite at the starting point ({f0})")
    bounds = None
    if options.bounds is not None:
        lo, hi = _bound_arrays(options.bounds)
        bounds = sciopt.Bounds(lo, hi)
    scipy_options = {
        "maxiter": options.max_iterations,
        "xatol": options.simplex_tolerance,
        "fatol": options.value_tolerance,
        "adaptive": options.adaptive,
    }
    if options.max_evaluations is not None:
        scipy_options["maxfev"] = options.max_evaluations
    callback = None
    trace_file = None
    if trace_path is not None:
        trace_file = open(trace_path, "a")
        counter = [0]

        def callback(intermediate_result):
            counter[0] += 1
            trace_file.write(
                json.dumps(
                    {
                        "iteration": counter[0],
                        "expectation": float(intermediate_result.fun),
                        "params": [float(v) for v in intermediate_result.x],
                    }
                )
                + "\n"
            )

    try:
        res = sciopt.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=bounds,
            options=scipy_options,
            callback=callback,
        )
    finally:
        if trace_file is not None:
            trace_file.close()
    return NelderMeadResult(
        x=np.asarray(res.x, dtype=float),
        value=float(res.fun),
        evaluations=int(res.nfev) + 1,  # +1 for the starting-point check above
        iterations=int(res.nit),
    )


def _bound_arrays(bounds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    b = np.asarray(bounds, dtype=float)
    return b[:, 0], b[:, 1]


@dataclass
class WarmStart:
    """Best depth-p outcome carried into the depth-(p+1) optimisation."""

    params: ParameterVector
    wavepacket_centres: np.ndarray | None = None
    bound_halfwidth: float | None = None


@dataclass
class RepeatResult:
    params: ParameterVector
    expectation: float
    evaluations: int
    seed: int
    state: StateVector = field(repr=False)
    wavepacket_centres: np.ndarray | None = None
    bound_halfwidth: float | None = None
    identity_extension: bool = False


@dataclass
class DepthResult:
    depth: int
    repeats: list[RepeatResult]

    @property
    def best_index(self) -> int:
        values = [r.expectation for r in self.repeats]
        return int(np.argmin(values))

    @property
    def best(self) -> RepeatResult:
        return self.repeats[self.best_index]

    def warm_start(self) -> WarmStart:
        best = self.best
        return WarmStart(best.params, best.wavepacket_centres, best.bound_halfwidth)


def _as_warm_start(warm) -> WarmStart | None:
    if warm is None or isinstance(warm, WarmStart):
        return warm
    if isinstance(warm, ParameterVector):
        return WarmStart(warm)
    raise TypeError(f"warm start must be a ParameterVector or WarmStart, got {type(warm)}")


def _resolve_seeds(seeds, repeats: int) -> list[int]:
    if np.isscalar(seeds):
        return [int(seeds) + j for j in range(repeats)]
    seeds = [int(s) for s in seeds]
    if len(seeds) != repeats:
        raise ValueError(f"need {repeats} seeds, got {len(seeds)}")
    return seeds


def _draw_layer(rng: np.random.Generator, times_per_layer: int) -> tuple[float, np.ndarray]:
    gamma = rng.uniform(*GAMMA_RANGE)
    times = rng.uniform(*WALK_TIME_RANGE, size=times_per_layer)
    return gamma, times


def _initial_params(
    spec: AnsatzSpec,
    dims: int,
    warm: WarmStart | None,
    rng: np.random.Generator,
    identity_extension: bool,
) -> ParameterVector:
    p = spec.depth
    m = spec.walk_times_per_layer(dims)
    gammas = np.empty(p)
    times = np.empty((p, m))
    start = 0
    if warm is not None:
        if warm.params.depth != p - 1 or warm.params.walk_times.shape[1] != m:
            raise ValueError(
                f"warm start layout {warm.params.walk_times.shape} does not fit depth {p}"
            )
        gammas[: p - 1] = warm.params.gammas
        times[: p - 1] = warm.params.walk_times
        start = p - 1
    for layer in range(start, p):
        if identity_extension:
            gammas[layer], times[layer] = 0.0, np.zeros(m)
        elif spec.algorithm is Algorithm.QOWE:
            gammas[layer], times[layer] = QOWE_GAMMA0, np.full(m, QOWE_T0)
        else:
            gammas[layer], times[layer] = _draw_layer(rng, m)
    return ParameterVector(gammas, times)


def _objective_closure(spec, table, grid):
    p = spec.depth
    m = spec.walk_times_per_layer(grid.dims)

    def fn(flat: np.ndarray) -> float:
        params = ParameterVector.unflatten(flat, p, m)
        return expectation(apply_ansatz(spec, params, table, grid), table)

    return fn


def _qowe_bounds(p: int, times_per_layer: int, halfwidth: float) -> np.ndarray:
    """Layer-major bounds matching ParameterVector.flatten()."""
    rows = []
    for _ in range(p):
        rows.append((QOWE_GAMMA0 - halfwidth, QOWE_GAMMA0 + halfwidth))
        rows.extend([(0.0, QOWE_T0 + halfwidth)] * times_per_layer)
    return np.asarray(rows)


def _expand_halfwidth_to_cover(halfwidth: float, params: ParameterVector) -> float:
    """Smallest halfwidth in the 0.1 * 1.2^n ladder covering the warm params."""
    needed_gamma = float(np.max(np.abs(params.gammas - QOWE_GAMMA0))) if params.depth else 0.0
    needed_t = float(np.max(params.walk_times - QOWE_T0)) if params.walk_times.size else 0.0
    needed = max(needed_gamma, needed_t)
    while halfwidth < needed and halfwidth < QOWE_MAX_HALFWIDTH:
        halfwidth *= QOWE_GROWTH
    return min(halfwidth, QOWE_MAX_HALFWIDTH)


def draw_wavepacket_centres(grid: SolutionGrid, rng: np.random.Generator) -> np.ndarray:
    """Uniform centres over the domain shrunk by one eighth of its span per side."""
    span = grid.upper - grid.lower
    return rng.uniform(grid.lower + span / 8.0, grid.upper - span / 8.0)


def run_single_repeat(
    spec: AnsatzSpec,
    table: ObjectiveTable,
    grid: SolutionGrid,
    warm: WarmStart | None,
    seed: int,
    options: OptimiserOptions,
    identity_extension: bool,
) -> RepeatResult:
    rng = np.random.default_rng(seed)
    centres = None
    if spec.algorithm is Algorithm.QOWE and spec.initial_state != "equal":
        if identity_extension and warm is not None and warm.wavepacket_centres is not None:
            centres = warm.wavepacket_centres
        else:
            centres = draw_wavepacket_centres(grid, rng)
        spec = spec.with_initial_state(
            WavepacketSpec(centres, np.full(grid.dims, QOWE_SIGMA))
        )
    params0 = _initial_params(spec, grid.dims, warm, rng, identity_extension)
    fn = _objective_closure(spec, table, grid)

    if spec.algorithm is Algorithm.QOWE:
        result, halfwidth, evaluations = _qowe_expansion_loop(
            fn, params0, spec, grid.dims, warm, options
        )
    else:
        result = nelder_mead(fn, params0.flatten(), options)
        halfwidth = None
        evaluations = result.evaluations

    best_params = ParameterVector.unflatten(
        result.x, spec.depth, spec.walk_times_per_layer(grid.dims)
    )
    state = apply_ansatz(spec, best_params, table, grid)
    return RepeatResult(
        params=best_params,
        expectation=float(result.value),
        evaluations=evaluations,
        seed=seed,
        state=state,
        wavepacket_centres=centres,
        bound_halfwidth=halfwidth,
        identity_extension=identity_extension,
    )


def _qowe_expansion_loop(
    fn: Callable[[np.ndarray], float],
    params0: ParameterVector,
    spec: AnsatzSpec,
    dims: int,
    warm: WarmStart | None,
    options: OptimiserOptions,
) -> tuple[NelderMeadResult, float, int]:
    """Re-run the optimisation with 1.2x wider bounds while the optimum pins.

    The starting half-width carries over from the warm start (and is widened,
    if necessary, until the warm parameters are feasible) so a warm-started
    optimisation never clamps its own starting point.
    """
    m = spec.walk_times_per_layer(dims)
    halfwidth = QOWE_INITIAL_HALFWIDTH
    if warm is not None and warm.bound_halfwidth is not None:
        halfwidth = warm.bound_halfwidth
    halfwidth = _expand_halfwidth_to_cover(halfwidth, params0)
    x0 = params0.flatten()
    evaluations = 0
    while True:
        bounds = _qowe_bounds(spec.depth, m, halfwidth)
        result = nelder_mead(fn, x0, replace(options, bounds=bounds))
        evaluations += result.evaluations
        pinned = np.any(
            (np.abs(result.x - bounds[:, 0]) <= BOUND_HIT_TOL)
            | (np.abs(result.x - bounds[:, 1]) <= BOUND_HIT_TOL)
        )
        if not pinned or halfwidth >= QOWE_MAX_HALFWIDTH:
            return result, halfwidth, evaluations
        halfwidth = min(halfwidth * QOWE_GROWTH, QOWE_MAX_HALFWIDTH)


def _repeat_task(args):
    return run_single_repeat(*args)


def _default_workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("QVASIM_WORKERS")
    return max(1, int(env)) if env else 1


def optimise_at_depth(
    spec: AnsatzSpec,
    table: ObjectiveTable,
    grid: SolutionGrid,
    p: int,
    warm_start: WarmStart | ParameterVector | None = None,
    repeats: int = 10,
    seeds: int | Sequence[int] = 0,
    options: OptimiserOptions | None = None,
    workers: int | None = None,
) -> DepthResult:
    """Best of ``repeats`` independent optimisations at depth ``p``.

    Ties between repeats resolve to the lowest repeat index. ``seeds`` is
    either one base seed (repeat j uses base + j) or one seed per repeat.
    """
    spec = spec.at_depth(p)
    warm = _as_warm_start(warm_start)
    options = options or OptimiserOptions()
    seed_list = _resolve_seeds(seeds, repeats)
    tasks = [
        (spec, table, grid, warm, seed_list[j], options, warm is not None and j == 0)
        for j in range(repeats)
    ]
    n_workers = _default_workers(workers)
    if n_workers > 1 and repeats > 1:
        with ProcessPoolExecutor(max_workers=min(n_workers, repeats)) as pool:
            results = list(pool.map(_repeat_task, tasks))
    else:
        results = [_repeat_task(t) for t in tasks]
    return DepthResult(depth=p, repeats=results)


def qowe_optimise(
    spec: AnsatzSpec,
    table: ObjectiveTable,
    grid: SolutionGrid,
    p: int,
    warm_start: WarmStart | ParameterVector | None = None,
    repeats: int = 10,
    seeds: int | Sequence[int] = 0,
    options: OptimiserOptions | None = None,
    workers: int | None = None,
) -> DepthResult:
    """Bound-expanded optimisation of the wavepacket-evolution ansatz."""
    if spec.algorithm is not Algorithm.QOWE:
        raise ValueError("qowe_optimise needs a QOWE ansatz spec")
    return optimise_at_depth(
        spec, table, grid, p, warm_start, repeats, seeds, options, workers
    )


def depth_sweep(
    spec: AnsatzSpec,
    table: ObjectiveTable,
    grid: SolutionGrid,
    depths: Sequence[int],
    repeats: int = 10,
    seed_fn: Callable[[int, int], int] | None = None,
    options: OptimiserOptions | None = None,
    workers: int | None = None,
    warm_start: WarmStart | None = None,
    on_depth: Callable[[DepthResult], None] | None = None,
) -> list[DepthResult]:
    """Warm-start-chained sweep over ascending depths.

    ``seed_fn(p, repeat)`` supplies per-repeat seeds (defaults to
    ``1000 * p + repeat``); ``on_depth`` fires after each completed depth.
    """
    depths = list(depths)
    if depths != sorted(depths) or len(set(depths)) != len(depths):
        raise ValueError("depths must be strictly ascending")
    seed_fn = seed_fn or (lambda p, j: 1000 * p + j)
    results = []
    warm = warm_start
    for p in depths:
        seeds = [seed_fn(p, j) for j in range(repeats)]
        if warm is not None and warm.params.depth != p - 1:
            warm = None  # chain only links consecutive depths
        dr = optimise_at_depth(
            spec, table, grid, p, warm, repeats, seeds, options, workers
        )
        results.append(dr)
        warm = dr.warm_start()
        if on_depth is not None:
            on_depth(dr)
    return results
