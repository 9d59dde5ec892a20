import json
from dataclasses import asdict, replace

import numpy as np
import pytest

from qvasim.harness import (
    ConfigError,
    ExperimentConfig,
    config_hash,
    load_config,
    run_experiment,
    seed_for,
    summarise,
)
from qvasim.harness.cli import main
from qvasim.harness.runner import (
    ExperimentRecord,
    HybridRecord,
    build_ansatz_spec,
    load_records,
    write_csv,
)
from qvasim.harness.summary import emit_plot_data, write_summary_csv


def tiny_config(tmp_path, **overrides) -> ExperimentConfig:
    base = dict(
        kind="mixer_comparison",
        algorithms=["qmoa_complete", "qaoa_complete"],
        functions=["styblinski_tang"],
        dims=2,
        n_points=4,
        depth_range=(1, 2),
        repeats=2,
        base_seed=7,
        output_dir=str(tmp_path / "out"),
    )
    base.update(overrides)
    return ExperimentConfig(**base).validate()


def fake_record(**overrides) -> ExperimentRecord:
    base = dict(
        config_hash="abc",
        kind="depth_sweep",
        algorithm="qmoa_complete",
        function="rastrigin",
        dims=3,
        n_points=32,
        depth=1,
        repeat=0,
        seed=1,
        expectation=10.0,
        mean_error=0.5,
        statistical_distance=0.4,
        max_amplification=2.0,
        max_amplified_index=3,
        max_amplified_rank=1,
        evaluations=100,
        wall_time=1.0,
        params=[0.1, 0.2],
    )
    base.update(overrides)
    return ExperimentRecord(**base)


class TestConfig:
    def test_yaml_roundtrip(self, tmp_path):
        path = tmp_path / "cfg.yaml"
        path.write_text(
            "kind: depth_sweep\n"
            "algorithm: qmoa_complete\n"
            "function: rastrigin\n"
            "dims: 3\n"
            "n_points: 32\n"
            "depth_range: [1, 8]\n"
            "repeats: 10\n"
            "base_seed: 42\n"
            "output_dir: out\n"
        )
        config = load_config(path)
        assert config.algorithms == ["qmoa_complete"]
        assert config.depths() == list(range(1, 9))

    def test_cli_overrides(self, tmp_path):
        path = tmp_path / "cfg.yaml"
        path.write_text(
            "kind: depth_sweep\nalgorithm: qmoa_complete\nfunction: rastrigin\n"
            "dims: 3\nn_points: 32\ndepth_range: [1, 2]\nrepeats: 10\n"
            "base_seed: 42\noutput_dir: out\n"
        )
        config = load_config(path, ["repeats=3", "n_points=16"])
        assert config.repeats == 3
        assert config.n_points == 16

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "cfg.yaml"
        path.write_text("kind: depth_sweep\nbogus_key: 1\n")
        with pytest.raises(ConfigError, match="bogus_key"):
            load_config(path)

    def test_empty_depth_range_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="ascending"):
            tiny_config(tmp_path, depth_range=(3, 2))

    def test_unknown_function_and_kind(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown function"):
            tiny_config(tmp_path, functions=["nope"])
        with pytest.raises(ConfigError, match="unknown kind"):
            tiny_config(tmp_path, kind="nope")
        with pytest.raises(ConfigError, match="unknown algorithm"):
            tiny_config(tmp_path, algorithms=["qantum"])

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="not found"):
            load_config("/nonexistent/config.yaml")

    def test_hash_tracks_semantics_only(self, tmp_path):
        a = tiny_config(tmp_path)
        b = tiny_config(tmp_path, output_dir=str(tmp_path / "elsewhere"))
        c = tiny_config(tmp_path, repeats=3)
        assert config_hash(a) == config_hash(b)
        assert config_hash(a) != config_hash(c)

    def test_seed_formula(self):
        assert seed_for(42, 1, 0) == seed_for(42, 1, 0)
        seeds = {seed_for(42, p, j) for p in range(1, 9) for j in range(10)}
        assert len(seeds) == 80
        assert seed_for(42, 1, 0) != seed_for(43, 1, 0)

    def test_build_ansatz_spec_labels(self):
        from qvasim.ansatz import Algorithm

        assert build_ansatz_spec("qmoa_complete", 2, 8).algorithm is Algorithm.QMOA
        assert build_ansatz_spec("qmoa_banded_2", 2, 8).graphs[0].connection_set == {1, 2}
        assert build_ansatz_spec("qaoa_hypercube", 2, 8).algorithm is Algorithm.QAOA_HYPERCUBE
        assert build_ansatz_spec("qowe_equal", 2, 8).initial_state == "equal"
        with pytest.raises(ConfigError, match="bandwidth"):
            build_ansatz_spec("qmoa_banded_9", 2, 8)


class TestRunner:
    def test_record_counts_and_ranges(self, tmp_path):
        config = tiny_config(tmp_path)
        records = run_experiment(config)
        assert len(records) == 2 * 2 * 2  # algorithms x depths x repeats
        for r in records:
            assert 0.0 <= r.mean_error <= 1.0
            assert 0.0 <= r.statistical_distance <= 1.0
            assert r.max_amplification >= 0.0
            assert r.seed == seed_for(7, r.depth, r.repeat)

    def test_rerun_is_idempotent(self, tmp_path):
        config = tiny_config(tmp_path)
        first = run_experiment(config)
        jsonl = (tmp_path / "out" / "records.jsonl").read_text()
        second = run_experiment(config)
        assert (tmp_path / "out" / "records.jsonl").read_text() == jsonl
        assert len(second) == len(first)

    def test_resume_after_interruption_matches_uninterrupted(self, tmp_path):
        config = tiny_config(tmp_path)
        reference = {r.key(): r for r in run_experiment(config)}

        interrupted_dir = tmp_path / "out2"
        config2 = replace(config, output_dir=str(interrupted_dir))
        run_experiment(config2)
        # simulate a crash at the first depth boundary: drop every record
        # beyond depth 1
        path = interrupted_dir / "records.jsonl"
        kept = [
            line
            for line in path.read_text().splitlines()
            if json.loads(line)["depth"] == 1
        ]
        path.write_text("\n".join(kept) + "\n")
        resumed = {r.key(): r for r in run_experiment(config2)}

        assert set(resumed) == set(reference)
        for key, record in reference.items():
            got = asdict(resumed[key])
            want = asdict(record)
            got.pop("wall_time")
            want.pop("wall_time")
            got.pop("config_hash")
            want.pop("config_hash")
            assert got == want, key

    def test_stored_params_replay_to_recorded_expectation(self, tmp_path):
        import qvasim as q

        config = tiny_config(tmp_path, algorithms=["qmoa_complete", "qowe_gaussian"])
        records = run_experiment(config)
        fn = q.get_function("styblinski_tang")
        lower, upper = fn.domain(2)
        grid = q.make_grid(lower, upper, 4)
        table = q.build_objective(grid, fn.fn)
        for r in records:
            spec = build_ansatz_spec(r.algorithm, 2, 4).at_depth(r.depth)
            if r.wavepacket_centres is not None:
                spec = spec.with_initial_state(
                    q.WavepacketSpec(
                        np.array(r.wavepacket_centres), np.full(2, 1 / np.sqrt(2))
                    )
                )
            params = q.ParameterVector.unflatten(
                np.array(r.params), r.depth, spec.walk_times_per_layer(2)
            )
            replayed = q.objective_value(spec, params, table, grid)
            assert replayed == pytest.approx(r.expectation, abs=1e-9), r.key()

    def test_degree_sweep_labels(self, tmp_path):
        config = tiny_config(
            tmp_path,
            kind="degree_sweep",
            algorithms=[],
            bandwidths=[1, 2],
            depth_range=(1, 1),
        )
        records = run_experiment(config)
        assert {r.algorithm for r in records} == {"qmoa_banded_1", "qmoa_banded_2"}

    def test_scaling_study_emits_fits(self, tmp_path):
        config = tiny_config(
            tmp_path,
            kind="scaling_study",
            algorithms=["qmoa_complete"],
            functions=["rastrigin"],
            depth_range=(1, 3),
            dims_list=[2],
            grid_sizes=[4],
            repeats=2,
        )
        records = run_experiment(config)
        assert len(records) == 3 * 2
        fits = (tmp_path / "out" / "scaling_fits.csv").read_text().splitlines()
        assert fits[0].startswith("algorithm,function,dims,n_points,alpha")
        assert len(fits) == 2

    def test_hybrid_study(self, tmp_path):
        config = tiny_config(
            tmp_path,
            kind="hybrid_study",
            algorithms=[],
            functions=["sphere"],
            dims=2,
            n_points=8,
            depth_range=(1, 1),
            repeats=2,
        )
        records = run_experiment(config)
        assert len(records) == 2
        for r in records:
            assert isinstance(r, HybridRecord)
            assert r.fev_assisted == 30 * 2 * r.fev_qmoa + r.fev_nelder_mead
            assert r.speedup == pytest.approx(r.baseline_fev / r.fev_assisted)
        # resumable: rerun adds nothing
        again = run_experiment(config)
        assert len(again) == 2


class TestSummarise:
    def test_population_statistics(self):
        records = [
            fake_record(repeat=0, mean_error=0.1, expectation=1.0),
            fake_record(repeat=1, mean_error=0.3, expectation=2.0),
        ]
        rows = summarise(records, ["algorithm", "depth"])
        assert len(rows) == 1
        row = rows[0]
        assert row["mean_error_mean"] == pytest.approx(0.2)
        assert row["mean_error_pstd"] == pytest.approx(0.1)
        assert row["best_repeat"] == 0
        assert row["n"] == 2

    def test_identical_records_have_zero_spread(self):
        records = [fake_record(repeat=j) for j in range(10)]
        rows = summarise(records, ["algorithm"])
        assert rows[0]["expectation_pstd"] == 0.0

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="group-by"):
            summarise([fake_record()], ["nonsense"])

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="no records"):
            summarise([], ["algorithm"])

    def test_summary_csv(self, tmp_path):
        rows = summarise([fake_record()], ["algorithm"])
        path = tmp_path / "summary.csv"
        write_summary_csv(rows, path)
        header = path.read_text().splitlines()[0]
        assert header.startswith("algorithm,n,")


class TestPlotData:
    def _sweep_records(self):
        records = []
        for algorithm in ("qmoa_complete", "qaoa_hypercube"):
            for depth in range(1, 9):
                for repeat in range(3):
                    records.append(
                        fake_record(
                            algorithm=algorithm,
                            depth=depth,
                            repeat=repeat,
                            mean_error=0.5 / depth + 0.01 * repeat,
                            max_amplification=2.0 ** (depth * 0.5) + repeat,
                            expectation=10.0 - depth,
                        )
                    )
        return records

    def test_mean_error_series(self, tmp_path):
        paths = emit_plot_data(self._sweep_records(), "mean_error_vs_depth", tmp_path)
        assert len(paths) == 2
        rows = np.loadtxt(paths[0], delimiter=",", skiprows=1)
        assert rows.shape == (8, 3)

    def test_rdgs_baseline_endpoint(self, tmp_path):
        paths = emit_plot_data(self._sweep_records(), "amplification_vs_depth", tmp_path)
        baseline = next(p for p in paths if "rdgs_baseline" in p.name)
        rows = np.loadtxt(baseline, delimiter=",", skiprows=1)
        assert rows[-1, 0] == 8
        assert rows[-1, 1] == pytest.approx(288.15, abs=0.01)

    def test_function_bars_at_max_depth(self, tmp_path):
        paths = emit_plot_data(self._sweep_records(), "function_bars", tmp_path)
        assert {p.name for p in paths} == {
            "function_bars__qmoa_complete__p8.csv",
            "function_bars__qaoa_hypercube__p8.csv",
        }

    def test_scaling_includes_fit_column(self, tmp_path):
        paths = emit_plot_data(self._sweep_records(), "scaling", tmp_path)
        rows = np.loadtxt(paths[0], delimiter=",", skiprows=1)
        assert rows.shape[1] == 4  # x, y, y_err, y_fit

    def test_speedup_series(self, tmp_path):
        records = [
            HybridRecord(
                config_hash="h",
                kind="hybrid_study",
                function="rastrigin",
                dims=dims,
                n_points=16,
                depth=5,
                repeat=repeat,
                seed=0,
                success=True,
                fev_qmoa=10,
                fev_nelder_mead=100,
                fev_assisted=30 * 6 * 10 + 100,
                seeds_tried=1,
                baseline_fev=5000,
                baseline_success=True,
                baseline_restarts=10,
                speedup=2.0 + dims + 0.1 * repeat,
                wall_time=0.1,
            )
            for dims in (2, 3)
            for repeat in range(2)
        ]
        paths = emit_plot_data(records, "speedup_vs_dimension", tmp_path)
        rows = np.loadtxt(paths[0], delimiter=",", skiprows=1)
        assert rows.shape == (2, 3)

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="unknown plot kind"):
            emit_plot_data(self._sweep_records(), "nope", tmp_path)

    def test_empty_records_diagnostic(self, tmp_path):
        with pytest.raises(ValueError, match="no records"):
            emit_plot_data([], "mean_error_vs_depth", tmp_path)


class TestCli:
    def test_run_and_summarise_and_plot(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.yaml"
        out = tmp_path / "out"
        cfg.write_text(
            "kind: depth_sweep\nalgorithm: qmoa_complete\nfunction: styblinski_tang\n"
            f"dims: 2\nn_points: 4\ndepth_range: [1, 1]\nrepeats: 2\nbase_seed: 3\n"
            f"output_dir: {out}\n"
        )
        assert main(["run", str(cfg)]) == 0
        assert main(["summarise", str(out / "records.jsonl"), "--out", str(tmp_path / "s.csv")]) == 0
        assert main([
            "plot-data",
            str(out / "records.jsonl"),
            "--kind",
            "mean_error_vs_depth",
            "--out",
            str(tmp_path / "plots"),
        ]) == 0
        assert (tmp_path / "s.csv").exists()

    def test_config_error_exit_code(self, tmp_path):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("kind: nope\n")
        assert main(["run", str(cfg)]) == 2

    def test_missing_records_exit_code(self, tmp_path):
        assert main(["summarise", str(tmp_path / "none.jsonl")]) == 3

    def test_catalogue(self, capsys):
        assert main(["catalogue"]) == 0
        out = capsys.readouterr().out
        assert "styblinski_tang" in out
        assert "qmoa_complete" in out


def test_write_and_load_records_roundtrip(tmp_path):
    records = [fake_record(repeat=j) for j in range(3)]
    path = tmp_path / "records.csv"
    write_csv(records, path)
    assert path.read_text().count("\n") == 4  # header + 3 rows

    jsonl = tmp_path / "records.jsonl"
    from qvasim.harness.runner import _append_records

    _append_records(jsonl, records)
    loaded = load_records(jsonl)
    assert [r.repeat for r in loaded] == [0, 1, 2]
    assert loaded[0] == records[0]
