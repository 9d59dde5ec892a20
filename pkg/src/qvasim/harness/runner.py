"""Experiment execution: seeded repeats, warm-start chaining, persistence.

Records are appended to ``records.jsonl`` as each depth completes, so an
interrupted run resumes from what is already on disk: completed (algorithm,
function, depth, repeat) combinations are never recomputed, and the warm
start for the next depth is reconstructed from the stored best record. A
consolidated ``records.csv`` (sorted, reproducible modulo wall-time columns)
is rewritten at the end of every run.

Hybrid-study repeats use the seed formula with the depth slot set to
``1000 * dims + depth``; their classical baselines use the repeat slot offset
by 10**6.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..analysis import ScalingFit, fit_scaling, metrics_for_state
from ..ansatz import Algorithm, AnsatzSpec, ParameterVector
from ..engine import OptimiserOptions, WarmStart, run_single_repeat
from ..functions import get_function
from ..grid import build_objective, make_grid
from ..hybrid import classical_baseline, hybrid_optimise, speedup
from ..mixers import CirculantGraph
from ..states import WavepacketSpec
from .config import ConfigError, ExperimentConfig, config_hash, seed_for

RECORDS_NAME = "records.jsonl"
CSV_NAME = "records.csv"

RECORD_FIELDS = [
    "config_hash",
    "kind",
    "algorithm",
    "function",
    "dims",
    "n_points",
    "depth",
    "repeat",
    "seed",
    "expectation",
    "mean_error",
    "statistical_distance",
    "max_amplification",
    "max_amplified_index",
    "max_amplified_rank",
    "evaluations",
    "wall_time",
    "params",
    "wavepacket_centres",
    "bound_halfwidth",
]

HYBRID_FIELDS = [
    "config_hash",
    "kind",
    "function",
    "dims",
    "n_points",
    "depth",
    "repeat",
    "seed",
    "success",
    "fev_qmoa",
    "fev_nelder_mead",
    "fev_assisted",
    "seeds_tried",
    "baseline_fev",
    "baseline_success",
    "baseline_restarts",
    "speedup",
    "wall_time",
]


@dataclass
class ExperimentRecord:
    config_hash: str
    kind: str
    algorithm: str
    function: str
    dims: int
    n_points: int
    depth: int
    repeat: int
    seed: int
    expectation: float
    mean_error: float
    statistical_distance: float
    max_amplification: float
    max_amplified_index: int
    max_amplified_rank: int
    evaluations: int
    wall_time: float
    params: list[float]
    wavepacket_centres: list[float] | None = None
    bound_halfwidth: float | None = None

    def key(self) -> tuple:
        return (self.algorithm, self.function, self.dims, self.n_points, self.depth, self.repeat)


@dataclass
class HybridRecord:
    config_hash: str
    kind: str
    function: str
    dims: int
    n_points: int
    depth: int
    repeat: int
    seed: int
    success: bool
    fev_qmoa: int
    fev_nelder_mead: int
    fev_assisted: int
    seeds_tried: int
    baseline_fev: int
    baseline_success: bool
    baseline_restarts: int
    speedup: float
    wall_time: float

    def key(self) -> tuple:
        return (self.function, self.dims, self.n_points, self.depth, self.repeat)


def build_ansatz_spec(
    label: str, dims: int, n_points: int, shared_walk_time: bool = False
) -> AnsatzSpec:
    """Resolve a config algorithm label into an AnsatzSpec (depth 1)."""
    if label == "qmoa_complete":
        graphs = tuple(CirculantGraph.complete(n_points) for _ in range(dims))
        return AnsatzSpec(Algorithm.QMOA, 1, graphs=graphs, shared_walk_time=shared_walk_time)
    if label == "qmoa_cycle":
        graphs = tuple(CirculantGraph.cycle(n_points) for _ in range(dims))
        return AnsatzSpec(Algorithm.QMOA, 1, graphs=graphs, shared_walk_time=shared_walk_time)
    if label.startswith("qmoa_banded_"):
        bandwidth = int(label.rsplit("_", 1)[1])
        if bandwidth < 1 or bandwidth > n_points // 2:
            raise ConfigError(
                f"bandwidth {bandwidth} out of range [1, {n_points // 2}] for N={n_points}"
            )
        graphs = tuple(CirculantGraph.banded(n_points, bandwidth) for _ in range(dims))
        return AnsatzSpec(Algorithm.QMOA, 1, graphs=graphs, shared_walk_time=shared_walk_time)
    if label == "qaoa_complete":
        return AnsatzSpec(Algorithm.QAOA_COMPLETE, 1)
    if label == "qaoa_hypercube":
        return AnsatzSpec(Algorithm.QAOA_HYPERCUBE, 1)
    if label == "qowe_gaussian":
        placeholder = WavepacketSpec(np.zeros(dims), np.full(dims, 1.0))
        return AnsatzSpec(Algorithm.QOWE, 1, initial_state=placeholder)
    if label == "qowe_equal":
        return AnsatzSpec(Algorithm.QOWE, 1, initial_state="equal")
    raise ConfigError(f"unknown algorithm label {label!r}")


def _records_path(config: ExperimentConfig) -> Path:
    return Path(config.output_dir) / RECORDS_NAME


def _append_records(path: Path, records) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a") as fh:
        for record in records:
            payload = {"record": type(record).__name__, **asdict(record)}
            fh.write(json.dumps(payload) + "\n")


def load_records(path) -> list:
    """Read the line-delimited record log (missing file reads as empty)."""
    path = Path(path)
    if not path.exists():
        return []
    out = []
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            payload = json.loads(line)
            kind = payload.pop("record", "ExperimentRecord")
            cls = HybridRecord if kind == "HybridRecord" else ExperimentRecord
            out.append(cls(**payload))
    return out


def _workers(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("QVASIM_WORKERS")
    return max(1, int(env)) if env else 1


def _repeat_payload(args):
    started = time.perf_counter()
    result = run_single_repeat(*args)
    return result, time.perf_counter() - started


def _warm_start_from(records: list[ExperimentRecord], spec: AnsatzSpec, dims: int) -> WarmStart:
    best = min(records, key=lambda r: (r.expectation, r.repeat))
    params = ParameterVector.unflatten(
        np.asarray(best.params), best.depth, spec.walk_times_per_layer(dims)
    )
    centres = (
        np.asarray(best.wavepacket_centres)
        if best.wavepacket_centres is not None
        else None
    )
    return WarmStart(params, centres, best.bound_halfwidth)


def _run_sweep_cell(
    config: ExperimentConfig,
    label: str,
    function_name: str,
    dims: int,
    n_points: int,
    existing: dict[tuple, ExperimentRecord],
    workers: int,
) -> list[ExperimentRecord]:
    """Warm-start-chained depth sweep for one (algorithm, function, D, N)."""
    fn = get_function(function_name)
    if not fn.supports(dims):
        raise ConfigError(f"{function_name} is not defined for D={dims}")
    lower, upper = fn.domain(dims)
    grid = make_grid(lower, upper, n_points, qubit_cap=config.qubit_cap)
    table = build_objective(grid, fn.fn)
    base_spec = build_ansatz_spec(label, dims, n_points, config.shared_walk_time)
    opt = config.optimiser
    options = OptimiserOptions(
        max_iterations=opt.max_iterations,
        simplex_tolerance=opt.simplex_tolerance,
        value_tolerance=opt.value_tolerance,
        adaptive=opt.adaptive,
    )
    chash = config_hash(config)
    new_records: list[ExperimentRecord] = []
    warm: WarmStart | None = None
    path = _records_path(config)
    for depth in config.depths():
        spec = base_spec.at_depth(depth)
        depth_records: dict[int, ExperimentRecord] = {}
        todo = []
        for repeat in range(config.repeats):
            key = (label, function_name, dims, n_points, depth, repeat)
            if key in existing:
                depth_records[repeat] = existing[key]
            else:
                seed = seed_for(config.base_seed, depth, repeat)
                identity = warm is not None and repeat == 0
                todo.append(
                    (repeat, (spec, table, grid, warm, seed, options, identity))
                )
        if todo:
            if workers > 1 and len(todo) > 1:
                with ProcessPoolExecutor(max_workers=min(workers, len(todo))) as pool:
                    outcomes = list(pool.map(_repeat_payload, [t[1] for t in todo]))
            else:
                outcomes = [_repeat_payload(t[1]) for t in todo]
            fresh = []
            for (repeat, args), (result, elapsed) in zip(todo, outcomes):
                metrics = metrics_for_state(result.state, grid, table, result.expectation)
                record = ExperimentRecord(
                    config_hash=chash,
                    kind=config.kind,
                    algorithm=label,
                    function=function_name,
                    dims=dims,
                    n_points=n_points,
                    depth=depth,
                    repeat=repeat,
                    seed=args[4],
                    expectation=result.expectation,
                    mean_error=metrics.mean_error,
                    statistical_distance=metrics.statistical_distance,
                    max_amplification=metrics.max_amplification,
                    max_amplified_index=metrics.max_amplified_index,
                    max_amplified_rank=metrics.max_amplified_rank,
                    evaluations=result.evaluations,
                    wall_time=elapsed,
                    params=[float(v) for v in result.params.flatten()],
                    wavepacket_centres=(
                        [float(v) for v in result.wavepacket_centres]
                        if result.wavepacket_centres is not None
                        else None
                    ),
                    bound_halfwidth=result.bound_halfwidth,
                )
                depth_records[repeat] = record
                fresh.append(record)
            fresh.sort(key=lambda r: r.repeat)
            _append_records(path, fresh)
            new_records.extend(fresh)
        warm = _warm_start_from(list(depth_records.values()), spec, dims)
    return new_records


def _sweep_kind(config: ExperimentConfig, workers: int) -> list[ExperimentRecord]:
    if config.kind == "degree_sweep":
        labels = [f"qmoa_banded_{s}" for s in config.bandwidths]
    else:
        labels = config.algorithms
    cells = []
    if config.kind == "scaling_study":
        for dims in config.dims_list:
            for n_points in config.grid_sizes:
                cells.extend((label, f, dims, n_points) for label in labels for f in config.functions)
    else:
        cells = [(label, f, config.dims, config.n_points) for label in labels for f in config.functions]
    existing = {
        r.key(): r
        for r in load_records(_records_path(config))
        if isinstance(r, ExperimentRecord) and r.config_hash == config_hash(config)
    }
    records = list(existing.values())
    for label, function_name, dims, n_points in cells:
        records.extend(
            _run_sweep_cell(config, label, function_name, dims, n_points, existing, workers)
        )
    if config.kind == "scaling_study":
        _emit_scaling_fits(config, records)
    return records


def _emit_scaling_fits(config: ExperimentConfig, records: list[ExperimentRecord]) -> None:
    """Fit amplification growth per (algorithm, function, D, N) cell."""
    groups: dict[tuple, dict[int, list[float]]] = {}
    for r in records:
        cell = (r.algorithm, r.function, r.dims, r.n_points)
        groups.setdefault(cell, {}).setdefault(r.depth, []).append(r.max_amplification)
    path = Path(config.output_dir) / "scaling_fits.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["algorithm", "function", "dims", "n_points", "alpha", "alpha_stddev", "c"]
        )
        for cell in sorted(groups):
            by_depth = groups[cell]
            points = [
                (depth, cell[2], float(np.mean(values)))
                for depth, values in sorted(by_depth.items())
            ]
            fit: ScalingFit = fit_scaling(points)
            writer.writerow(list(cell) + [fit.alpha, fit.alpha_stddev, fit.c])


def _hybrid_kind(config: ExperimentConfig, workers: int) -> list[HybridRecord]:
    chash = config_hash(config)
    existing = {
        r.key(): r
        for r in load_records(_records_path(config))
        if isinstance(r, HybridRecord) and r.config_hash == chash
    }
    records = list(existing.values())
    depth = config.depth_range[0]
    dims_list = config.dims_list or [config.dims]
    path = _records_path(config)
    for function_name in config.functions:
        for dims in dims_list:
            todo = []
            for repeat in range(config.repeats):
                key = (function_name, dims, config.n_points, depth, repeat)
                if key not in existing:
                    todo.append(repeat)
            fresh = []
            for repeat in todo:
                seed = seed_for(config.base_seed, 1000 * dims + depth, repeat)
                baseline_seed = seed_for(
                    config.base_seed, 1000 * dims + depth, repeat + 10**6
                )
                started = time.perf_counter()
                run = hybrid_optimise(
                    function_name,
                    dims,
                    config.n_points,
                    depth,
                    epsilon=config.epsilon,
                    seed=seed,
                    sample_size=config.sample_size,
                )
                base = classical_baseline(
                    function_name, dims, epsilon=config.epsilon, seed=baseline_seed
                )
                fresh.append(
                    HybridRecord(
                        config_hash=chash,
                        kind=config.kind,
                        function=function_name,
                        dims=dims,
                        n_points=config.n_points,
                        depth=depth,
                        repeat=repeat,
                        seed=seed,
                        success=run.success,
                        fev_qmoa=run.accounting.fev_qmoa,
                        fev_nelder_mead=run.accounting.fev_nelder_mead,
                        fev_assisted=run.accounting.fev_assisted,
                        seeds_tried=run.seeds_tried,
                        baseline_fev=base.evaluations,
                        baseline_success=base.success,
                        baseline_restarts=base.restarts,
                        speedup=speedup(base.evaluations, run.accounting),
                        wall_time=time.perf_counter() - started,
                    )
                )
            if fresh:
                _append_records(path, fresh)
                records.extend(fresh)
    return records


def write_csv(records: list, path) -> None:
    """Consolidated CSV, sorted for reproducibility."""
    experiment = sorted(
        (r for r in records if isinstance(r, ExperimentRecord)), key=lambda r: r.key()
    )
    hybrid = sorted(
        (r for r in records if isinstance(r, HybridRecord)), key=lambda r: r.key()
    )
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        if experiment:
            writer.writerow(RECORD_FIELDS)
            for r in experiment:
                row = asdict(r)
                row["params"] = json.dumps(row["params"])
                row["wavepacket_centres"] = json.dumps(row["wavepacket_centres"])
                writer.writerow([row[f] for f in RECORD_FIELDS])
        if hybrid:
            writer.writerow(HYBRID_FIELDS)
            for r in hybrid:
                row = asdict(r)
                writer.writerow([row[f] for f in HYBRID_FIELDS])


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> list:
    """Execute a validated config; returns every record (existing + new)."""
    config.validate()
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    n_workers = _workers(workers)
    if config.kind == "hybrid_study":
        records = _hybrid_kind(config, n_workers)
    else:
        records = _sweep_kind(config, n_workers)
    write_csv(records, outdir / CSV_NAME)
    return records
