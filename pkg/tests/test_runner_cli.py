import filecmp
from pathlib import Path

import pytest

from antstream.cli import main
from antstream.config import ConfigError, load_config, parse_config
from antstream.runner import compare_runs, load_items, make_schedule, run_experiment

TINY = {
    "name": "tiny",
    "width": "15",
    "height": "15",
    "classes": "2",
    "per_class": "12",
    "spread": "0.05",
    "ants": "3",
    "horizon": "300",
    "checkpoints": "0,100,300",
}


def tiny_config(tmp_path, **extra):
    values = dict(TINY, out=str(tmp_path / "runs"))
    values.update({k: str(v) for k, v in extra.items()})
    return parse_config(values)


def write_schedule(tmp_path, text="release_step,count\n0,12\n100,12\n"):
    p = tmp_path / "sched.csv"
    p.write_text(text)
    return p


class TestRunExperiment:
    def test_batch_run_produces_expected_outputs(self, tmp_path):
        cfg = tiny_config(tmp_path)
        result = run_experiment(cfg)
        assert result.out_dir is not None and result.out_dir.is_dir()
        assert len(result.snapshots) == 3
        assert [s.step for s in result.snapshots] == [0, 100, 300]
        assert all(s.released == 24 for s in result.snapshots)
        for fname in ("manifest.txt", "reports.csv", "entropy.csv"):
            assert (result.out_dir / fname).exists()
        for step in (0, 100, 300):
            assert (result.out_dir / f"snapshot_{step:07d}.csv").exists()
            assert (result.out_dir / f"pheromone_{step:07d}.pgm").exists()

    def test_streaming_releases_follow_schedule(self, tmp_path):
        sched = write_schedule(tmp_path)
        cfg = tiny_config(tmp_path, schedule=str(sched))
        result = run_experiment(cfg, write_outputs=False)
        by_step = {s.step: s.released for s in result.snapshots}
        assert by_step[0] == 12
        assert by_step[100] == 24
        assert by_step[300] == 24

    def test_rates_recorded_or_skipped(self, tmp_path):
        cfg = tiny_config(tmp_path)
        result = run_experiment(cfg, write_outputs=False)
        assert len(result.reports) + len(result.skips) == 3
        assert 0.0 <= result.final_rate() <= 1.0

    def test_schedule_size_mismatch_rejected(self, tmp_path):
        sched = write_schedule(tmp_path, "release_step,count\n0,5\n")
        cfg = tiny_config(tmp_path, schedule=str(sched))
        with pytest.raises(ConfigError, match="sum"):
            run_experiment(cfg, write_outputs=False)

    def test_release_past_horizon_rejected(self, tmp_path):
        sched = write_schedule(tmp_path, "release_step,count\n0,12\n500,12\n")
        cfg = tiny_config(tmp_path, schedule=str(sched))
        with pytest.raises(ConfigError, match="horizon"):
            run_experiment(cfg, write_outputs=False)


class TestReproducibility:
    def artifacts(self, out_dir):
        return sorted(
            p.name
            for p in Path(out_dir).iterdir()
            if p.name != "manifest.txt"  # wall time makes it unique
        )

    def test_same_config_same_bytes(self, tmp_path):
        a = run_experiment(tiny_config(tmp_path, out=tmp_path / "a"))
        b = run_experiment(tiny_config(tmp_path, out=tmp_path / "b"))
        names = self.artifacts(a.out_dir)
        assert names == self.artifacts(b.out_dir)
        match, mismatch, errors = filecmp.cmpfiles(
            a.out_dir, b.out_dir, names, shallow=False
        )
        assert mismatch == [] and errors == []

    def test_manifest_reloads_into_identical_run(self, tmp_path):
        first = run_experiment(tiny_config(tmp_path, out=tmp_path / "a", seed=7))
        cfg2 = load_config(first.out_dir / "manifest.txt", {"out": str(tmp_path / "b")})
        second = run_experiment(cfg2)
        names = self.artifacts(first.out_dir)
        match, mismatch, errors = filecmp.cmpfiles(
            first.out_dir, second.out_dir, names, shallow=False
        )
        assert mismatch == [] and errors == []

    def test_different_seed_changes_outputs(self, tmp_path):
        a = run_experiment(tiny_config(tmp_path, out=tmp_path / "a", seed=1))
        b = run_experiment(tiny_config(tmp_path, out=tmp_path / "b", seed=2))
        sa = (a.out_dir / "snapshot_0000300.csv").read_text()
        sb = (b.out_dir / "snapshot_0000300.csv").read_text()
        assert sa != sb


class TestLoadItems:
    def test_synthetic_ids_dense(self, tmp_path):
        items = load_items(tiny_config(tmp_path))
        assert [it.id for it in items] == list(range(24))

    def test_csv_items_reindexed(self, tmp_path):
        p = tmp_path / "items.csv"
        p.write_text("10,a,0.0,1.0\n5,b,1.0,0.0\n7,a,0.5,0.5\n")
        cfg = tiny_config(tmp_path, data="csv", csv_path=str(p), csv_dim=2)
        items = load_items(cfg)
        assert [it.id for it in items] == [0, 1, 2]
        assert [it.label for it in items] == ["b", "a", "a"]  # ascending original id

    def test_data_seed_independent_of_schedule(self, tmp_path):
        sched = write_schedule(tmp_path)
        batch = tiny_config(tmp_path)
        stream = tiny_config(tmp_path, schedule=str(sched))
        a = load_items(batch)
        b = load_items(stream)
        assert all((x.features == y.features).all() for x, y in zip(a, b))


class TestCompareRuns:
    def test_needs_streaming_schedule(self, tmp_path):
        with pytest.raises(ConfigError, match="schedule"):
            compare_runs(tiny_config(tmp_path), [1, 2], write_outputs=False)

    def test_needs_two_seeds(self, tmp_path):
        sched = write_schedule(tmp_path)
        cfg = tiny_config(tmp_path, schedule=str(sched))
        with pytest.raises(ConfigError, match="seeds"):
            compare_runs(cfg, [1], write_outputs=False)

    def test_produces_per_seed_rows_and_csv(self, tmp_path):
        sched = write_schedule(tmp_path)
        cfg = tiny_config(tmp_path, schedule=str(sched))
        result = compare_runs(cfg, [1, 2])
        rows = result.rows()
        assert [seed for seed, _, _ in rows] == [1, 2]
        deltas = [s - b for _, b, s in rows]
        assert result.mean_delta == pytest.approx(sum(deltas) / 2)
        csvs = list((tmp_path / "runs").glob("compare-*.csv"))
        assert len(csvs) == 1
        lines = csvs[0].read_text().splitlines()
        assert lines[0] == "seed,batch_rate,stream_rate,delta"
        assert len(lines) == 5  # 2 seeds + mean + stddev


class TestCli:
    def write_cfg(self, tmp_path, **extra):
        values = dict(TINY, out=str(tmp_path / "runs"))
        values.update({k: str(v) for k, v in extra.items()})
        p = tmp_path / "exp.cfg"
        p.write_text("".join(f"{k}={v}\n" for k, v in values.items()))
        return p

    def test_run_succeeds(self, tmp_path, capsys):
        p = self.write_cfg(tmp_path)
        assert main(["run", str(p), "--seed", "3"]) == 0
        out = capsys.readouterr().out
        assert "run complete" in out

    def test_set_override_applied(self, tmp_path):
        p = self.write_cfg(tmp_path)
        assert main(["run", str(p), "--set", "horizon=100", "--set", "checkpoints=0,100"]) == 0
        run_dirs = list((tmp_path / "runs").iterdir())
        assert len(run_dirs) == 1
        manifest = (run_dirs[0] / "manifest.txt").read_text()
        assert "horizon=100\n" in manifest

    def test_config_error_exits_one(self, tmp_path, capsys):
        p = self.write_cfg(tmp_path, beta="-2")
        assert main(["run", str(p)]) == 1
        assert "beta" in capsys.readouterr().err

    def test_missing_file_exits_two(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "absent.cfg")]) == 2
        assert "error" in capsys.readouterr().err

    def test_compare_command(self, tmp_path, capsys):
        sched = write_schedule(tmp_path)
        p = self.write_cfg(tmp_path, schedule=str(sched))
        assert main(["compare", str(p), "--seeds", "1,2"]) == 0
        assert "mean delta" in capsys.readouterr().out

    def test_gen_synthetic_roundtrips_into_run(self, tmp_path):
        spec = self.write_cfg(tmp_path)
        out_csv = tmp_path / "items.csv"
        assert main(["gen-synthetic", str(spec), "--out", str(out_csv)]) == 0
        assert sum(1 for _ in out_csv.open()) == 24
        run_cfg = self.write_cfg(
            tmp_path, data="csv", csv_path=str(out_csv), csv_dim=2
        )
        assert main(["run", str(run_cfg)]) == 0
