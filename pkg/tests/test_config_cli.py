import csv
import math

import numpy as np
import pytest

from blindfir.cli import main
from blindfir.config import (PRESETS, ConfigError, format_manifest, parse_angle, parse_config,
                             preset, window_channel_set)
from blindfir.signal_model import zero_separation


@pytest.mark.parametrize("text,value", [
    ("pi", math.pi), ("pi/10", math.pi / 10), ("2*pi/3", 2 * math.pi / 3), ("-pi/50", -math.pi / 50),
    ("0.5pi", math.pi / 2), ("0.25", 0.25), (" PI / 4 ", math.pi / 4),
])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value, rel=1e-15)


class TestPresets:
    def test_exp1(self):
        cfg = preset("exp1-well")
        assert cfg.theta == pytest.approx(math.pi / 10) and cfg.deltas == (math.pi,)
        assert cfg.N == 100 and cfg.n_trials == 100 and cfg.windows == (4,)
        assert cfg.snr_grid_db == (0, 5, 10, 15, 20, 25, 30)

    def test_ill(self):
        assert preset("exp2-ill").deltas == (pytest.approx(math.pi / 10),)
        assert preset("exp2-severe").deltas == (pytest.approx(math.pi / 50),)

    def test_delta_sweep(self):
        cfg = preset("exp3-delta-sweep")
        assert cfg.snr_grid_db == (10.0,)
        assert len(cfg.deltas) == 20
        assert cfg.deltas[0] == pytest.approx(math.pi / 100) and cfg.deltas[-1] == pytest.approx(math.pi)
        assert np.allclose(np.diff(np.log(cfg.deltas)), np.log(100) / 19)

    def test_window_sweep(self):
        cfg = preset("exp4-window-sweep")
        assert cfg.windows == (3, 4, 5, 6)
        assert (cfg.channel.m, cfg.channel.L) == (3, 5)
        assert zero_separation(window_channel_set()) > 0.1

    def test_unknown(self):
        with pytest.raises(KeyError):
            preset("exp9")


class TestConfigParsing:
    def test_full(self):
        cfg = parse_config("""
            # comment
            name = demo
            theta = pi/10
            delta = pi, pi/50   # sweep
            N = 80
            trials = 5
            snr_db = 0, 15
            M = 4, 5
            methods = sss
            seed = 99
            noiseless = no
        """)
        assert cfg.name == "demo" and cfg.N == 80 and cfg.n_trials == 5
        assert cfg.deltas == (pytest.approx(math.pi), pytest.approx(math.pi / 50))
        assert cfg.windows == (4, 5) and cfg.methods == ("SSS",) and cfg.master_seed == 99

    def test_inline_taps(self):
        cfg = parse_config("taps = 1, 0.5j; (0.2-1j), 1\nM = 3")
        np.testing.assert_array_equal(cfg.channel.taps, [[1, 0.5j], [0.2 - 1j, 1]])
        assert cfg.theta is None

    def test_channel_file(self, tmp_path):
        (tmp_path / "ch.csv").write_text("# two subchannels\n1,2\n3,4j\n")
        (tmp_path / "run.cfg").write_text("channel_file = ch.csv\nM = 2\n")
        from blindfir.config import load_config
        cfg = load_config(tmp_path / "run.cfg")
        np.testing.assert_array_equal(cfg.channel.taps, [[1, 2], [3, 4j]])

    @pytest.mark.parametrize("text,line", [
        ("name = a\nbogus = 1\n", 2),
        ("N = 100\nN = 50\n", 2),
        ("\n\ntrials = many\n", 3),
        ("theta = pi/10\njust words\n", 2),
        ("methods = SS, MUSIC\n", 1),
        ("taps = 1, zz\n", 1),
    ])
    def test_errors_carry_line(self, text, line):
        with pytest.raises(ConfigError) as err:
            parse_config(text, source="x.cfg")
        assert err.value.line == line
        assert str(err.value).startswith(f"x.cfg:{line}:")

    def test_manifest_round_trip(self):
        for name in PRESETS:
            cfg = preset(name)
            again = parse_config(format_manifest(cfg))
            assert again.deltas == cfg.deltas and again.theta == cfg.theta
            assert again.snr_grid_db == cfg.snr_grid_db and again.windows == cfg.windows
            if cfg.channel is not None:
                np.testing.assert_array_equal(again.channel.taps, cfg.channel.taps)


def _rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class TestCli:
    def test_exp1_grid(self, tmp_path):
        assert main(["exp1-well", "--out", str(tmp_path), "--trials", "2", "--jobs", "1"]) == 0
        rows = _rows(tmp_path / "results.csv")
        assert len(rows) == 14
        assert {r["method"] for r in rows} == {"SS", "SSS"}
        assert (tmp_path / "manifest.txt").exists()
        assert not (tmp_path / "trials.csv").exists()

    def test_custom_single_method_and_replay(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("delta = pi/10\nmethods = SSS\ntrials = 3\nsnr_db = 10, 20\nseed = 5\n")
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["custom", "--config", str(cfg), "--out", str(out1), "--jobs", "1",
                     "--dump-trials", "--plot"]) == 0
        rows = _rows(out1 / "results.csv")
        assert len(rows) == 2 and all(r["method"] == "SSS" for r in rows)
        assert (out1 / "trials.csv").exists() and (out1 / "custom.png").exists()
        assert main(["custom", "--config", str(out1 / "manifest.txt"), "--out", str(out2),
                     "--jobs", "2"]) == 0
        assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()

    def test_overrides(self, tmp_path):
        assert main(["exp2-severe", "--out", str(tmp_path), "--trials", "2", "--seed", "7",
                     "--snr-grid", "0,30", "--jobs", "1"]) == 0
        rows = _rows(tmp_path / "results.csv")
        assert [float(r["snr_db"]) for r in rows] == [0, 30, 0, 30]
        assert all(r["n_trials"] == "2" for r in rows)
        text = (tmp_path / "manifest.txt").read_text()
        assert "seed = 7" in text and "trials = 2" in text

    def test_env_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("BLINDFIR_OUT", str(tmp_path / "env"))
        assert main(["exp1-well", "--trials", "1", "--snr-grid", "10", "--jobs", "1"]) == 0
        assert (tmp_path / "env" / "results.csv").exists()

    def test_config_error_exit(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("N = 100\nwindow = 3\n")
        assert main(["custom", "--config", str(cfg), "--out", str(tmp_path)]) == 2
        assert f"{cfg}:2:" in capsys.readouterr().err

    def test_missing_config(self, tmp_path, capsys):
        assert main(["custom", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == 2
        assert main(["custom", "--out", str(tmp_path)]) == 2

    def test_io_error_exit(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["exp1-well", "--out", str(blocker / "sub"), "--trials", "1"]) == 1

    def test_plot_subcommand(self, tmp_path):
        main(["exp3-delta-sweep", "--out", str(tmp_path), "--trials", "1", "--jobs", "1"])
        assert main(["plot", str(tmp_path / "results.csv")]) == 0
        assert (tmp_path / "results.png").stat().st_size > 0
        assert main(["plot", str(tmp_path / "missing.csv")]) == 1

    def test_window_sweep_plot(self, tmp_path):
        assert main(["exp4-window-sweep", "--out", str(tmp_path), "--trials", "1",
                     "--snr-grid", "10,20", "--plot", "--jobs", "1"]) == 0
        rows = _rows(tmp_path / "results.csv")
        assert len(rows) == 2 * 2 * 4 and rows[0]["theta"] == "" and rows[0]["delta"] == ""
        assert (tmp_path / "exp4-window-sweep.png").exists()
