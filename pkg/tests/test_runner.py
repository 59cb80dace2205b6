import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from orderbook_lab.bps import BpsConfig
from orderbook_lab.errors import ConfigError
from orderbook_lab.genoa import GenoaConfig
from orderbook_lab.runner import cli
from orderbook_lab.runner.config import apply_scale, load_config
from orderbook_lab.runner.experiment import resolve_lags, run_experiment
from orderbook_lab.runner.io import read_path, write_path
from orderbook_lab.runner.presets import PRESETS, list_presets, preset_config
from orderbook_lab.stats import StatSeries

SMALL = """
name: small
seed: 7
replicas: 2
save: [path, trades, events]
runs:
  - label: m
    model: maslov
    params: {q: 0.05, nbar: 30, steps: 20000}
  - label: b
    model: bps
    params: {L: 20, N: 5, steps: 100000}
measurements:
  - estimator: return_distribution
    lags: [1, 10]
  - estimator: hurst_simplified
    lags: {lo: 1, hi: 100, per_decade: 4}
"""


class TestConfig:
    def test_load_inline(self):
        cfg = load_config(SMALL)
        assert cfg.seeds() == [7, 8]
        assert cfg.runs[1].config == BpsConfig(L=20, N=5, steps=100_000)

    def test_missing_seed(self):
        with pytest.raises(ConfigError, match="^seed: missing"):
            load_config("runs:\n  - model: bps\n    params: {L: 10, N: 2}\n")

    def test_field_path_in_error(self):
        doc = "seed: 1\nruns:\n  - model: genoa\n    params: {N: 100, b: 2}\n"
        with pytest.raises(ConfigError, match=r"runs\[0\]\.params: b must exceed 2"):
            load_config(doc)

    def test_parse_error_position(self):
        with pytest.raises(ConfigError, match="line 3"):
            load_config("seed: 1\nruns: [\n")

    @pytest.mark.parametrize("doc, field", [
        ("seed: 1\nruns:\n  - model: nope\n", r"runs\[0\]\.model"),
        ("seed: 1\nruns:\n  - model: bps\n    params: {L: 10, N: 2, zz: 1}\n", r"params\.zz"),
        ("seed: 1\nruns:\n  - model: bps\n    params: {L: 10.5, N: 2}\n", r"params\.L"),
        ("seed: 1\nbogus: 2\nruns: []\n", "bogus"),
        ("seed: 1\nruns: []\n", "runs"),
        ("seed: 1\nsave: [pics]\nruns:\n  - model: bps\n    params: {L: 10, N: 2}\n", "save"),
        ("seed: 1\nruns:\n  - model: bps\n    params: {L: 10, N: 2}\nmeasurements:\n"
         "  - estimator: magic\n", "estimator"),
    ])
    def test_errors_name_field(self, doc, field):
        with pytest.raises(ConfigError, match=field):
            load_config(doc)

    def test_scientific_integers(self):
        cfg = load_config("seed: 1\nruns:\n  - model: bps\n    params: {L: 10, N: 2, steps: 1e6}\n")
        assert cfg.runs[0].config.steps == 1_000_000

    def test_scale(self):
        cfg = apply_scale(load_config(SMALL), 100)
        assert cfg.runs[0].config.steps == 200
        assert cfg.runs[1].config.burn_in == BpsConfig(L=20, N=5).effective_burn_in // 100
        with pytest.raises(ConfigError):
            apply_scale(cfg, 0)

    def test_resolve_lags(self):
        lags, dropped = resolve_lags([1, 10, 100], limit=50)
        assert list(lags) == [1, 10] and dropped == [100]


class TestPresets:
    def test_every_preset_parses(self):
        names = [n for n, _, _ in list_presets()]
        assert len(names) == len(PRESETS) >= 26
        for n in names:
            preset_config(n)

    def test_caption_parameters(self):
        fig3 = preset_config("fig3-bps-returns")
        assert [(r.config.L, r.config.N) for r in fig3.runs] == [(250, 50), (500, 200), (250, 250)]
        fig9 = preset_config("fig9-genoa-returns")
        assert [r.config.g for r in fig9.runs] == [51, 52, 52.36]
        assert all((r.config.N, r.config.b) == (1000, 7) for r in fig9.runs)
        fig25 = preset_config("fig25-udm-autocorrelation")
        assert {(r.config.L, r.config.q, r.config.nbar) for r in fig25.runs} == {
            (100_000, 0.9, 1000), (100_000, 0.9, 100)}

    def test_large_bps_is_slow(self):
        tags = {n: t for n, _, t in list_presets()}
        assert "slow" in tags["fig4-bps-hurst-large"]

    def test_fig15_six_histograms(self, tmp_path):
        m = run_experiment(preset_config("fig15-maslov-returns"), tmp_path, scale=100)
        hist = [f for f in m.digests() if "return_distribution" in f and f.endswith(".csv")]
        assert len(hist) == 6

    def test_fig11_table(self, tmp_path):
        run_experiment(preset_config("fig11-genoa-phasediagram"), tmp_path, scale=100)
        s = StatSeries.from_csv(tmp_path / "protocol" / "genoa_phase_diagram.csv")
        assert list(s.x) == [3, 5, 7, 10]
        assert np.all(s.y > 0)


class TestExperiment:
    def test_outputs_and_manifest(self, tmp_path):
        m = run_experiment(load_config(SMALL), tmp_path)
        assert m.verify(tmp_path)
        man = json.loads((tmp_path / "manifest.json").read_text())
        assert man["seeds"] == [7, 8] and man["config"]["seed"] == 7
        with open(tmp_path / "m" / "seed7" / "events.csv") as fh:
            assert next(csv.reader(fh)) == ["birth_t", "death_t", "tick", "side", "cause"]
        with open(tmp_path / "b" / "seed8" / "trades.csv") as fh:
            assert next(csv.reader(fh)) == ["t", "price", "return"]
        merged = StatSeries.from_csv(tmp_path / "m" / "hurst_simplified.csv")
        meta = json.loads((tmp_path / "m" / "hurst_simplified.csv.json").read_text())
        assert "stderr" in meta and len(merged) > 0

    def test_deterministic_across_jobs(self, tmp_path):
        a = run_experiment(load_config(SMALL), tmp_path / "a", jobs=1)
        b = run_experiment(load_config(SMALL), tmp_path / "b", jobs=2)
        assert a.digests() == b.digests()

    def test_seed_changes_output(self, tmp_path):
        from dataclasses import replace
        a = run_experiment(load_config(SMALL), tmp_path / "a")
        b = run_experiment(replace(load_config(SMALL), seed=99), tmp_path / "b")
        assert a.digests() != b.digests()

    def test_path_roundtrip(self, tmp_path):
        from orderbook_lab.bps import bps_run
        from orderbook_lab.core import RngStream
        p = bps_run(BpsConfig(L=20, N=5, steps=50_000), RngStream(1))
        back = read_path(write_path(p, tmp_path / "path.csv"))
        assert np.array_equal(back.x, p.x) and back.dt == p.dt


class TestCli:
    def test_presets(self, capsys):
        assert cli.main(["presets"]) == 0
        assert "fig16-maslov-collapse" in capsys.readouterr().out

    def test_simulate_preset(self, tmp_path):
        assert cli.main(["simulate", "fig14-maslov-evolution", "--scale", "10", "--seed", "3",
                         "--out", str(tmp_path)]) == 0
        assert json.loads((tmp_path / "manifest.json").read_text())["seeds"] == [3]

    def test_simulate_config_file(self, tmp_path):
        cfg = tmp_path / "c.yaml"
        cfg.write_text(SMALL)
        assert cli.main(["simulate", str(cfg), "--out", str(tmp_path / "o")]) == 0

    @pytest.mark.parametrize("argv", [
        ["simulate", "no-such-thing"],
        ["simulate", "fig1-bps-evolution", "--scale", "0"],
        ["simulate", "fig1-bps-evolution", "--seed", "-1"],
        ["simulate"],
        ["analyze", "missing.csv", "--measure", "hurst_simplified"],
        ["frobnicate"],
    ])
    def test_config_errors_exit_2(self, argv, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            sys.exit(cli.main(argv + (["--out", str(tmp_path)] if argv[:1] == ["simulate"]
                                      and len(argv) > 1 else [])))
        assert exc.value.code == 2

    def test_bad_config_file_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("seed: 1\nruns:\n  - model: stigler\n    params: {variant: free, N: 10, s: 5, d: 3}\n")
        assert cli.main(["simulate", str(cfg), "--out", str(tmp_path)]) == 2
        assert "runs[0].params" in capsys.readouterr().err

    def test_runtime_failure_exit_3(self, tmp_path, monkeypatch):
        from orderbook_lab.runner import experiment

        def boom(*a, **k):
            raise RuntimeError("disk on fire")
        monkeypatch.setattr(experiment, "run_experiment", boom)
        assert cli.main(["simulate", "fig1-bps-evolution", "--out", str(tmp_path)]) == 3

    def test_analyze(self, tmp_path):
        x = np.concatenate([[0], np.cumsum(np.random.default_rng(0).choice([-1, 1], 20_000))])
        src = tmp_path / "p.csv"
        src.write_text("t,x\n" + "".join(f"{t},{v}\n" for t, v in enumerate(x)))
        out = tmp_path / "an"
        assert cli.main(["analyze", str(src), "--measure", "hurst_simplified",
                         "return_distribution", "--lags", "1,10,100", "--out", str(out)]) == 0
        s = StatSeries.from_csv(out / "hurst_simplified.csv")
        assert list(s.x) == [1, 10, 100]
        assert (out / "return_distribution_step_lag10.csv").exists()

    def test_console_entry_point(self):
        r = subprocess.run([sys.executable, "-m", "orderbook_lab.runner.cli", "presets"],
                           capture_output=True, text=True)
        assert r.returncode == 0 and "fig1-bps-evolution" in r.stdout
