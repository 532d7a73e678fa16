import csv
import json

import numpy as np
import pytest

from specgrad import cli
from specgrad.errors import NonFiniteLossError
from specgrad.optim import OptimTrace, TraceRecord


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestArgHandling:
    def test_no_command_is_a_usage_error(self):
        assert cli.main([]) == 2

    def test_help_exits_cleanly(self, capsys):
        assert cli.main(["--help"]) == 0
        assert "gradcheck" in capsys.readouterr().out

    def test_unknown_variant(self, tmp_path, capsys):
        code = cli.main(
            ["sweep", "--variant", "bogus", "--out-dir", str(tmp_path),
             "--dataset-size", "2", "--n-samples", "256", "--grid-steps", "3"]
        )
        assert code == 2
        assert "variant" in capsys.readouterr().err

    def test_theta0_outside_bounds(self, tmp_path, capsys):
        code = cli.main(["track", "--theta0", "99", "--out-dir", str(tmp_path)])
        assert code == 2
        assert "theta0" in capsys.readouterr().err

    def test_sweep_grid_outside_bounds(self, tmp_path, capsys):
        code = cli.main(
            ["sweep", "--grid-min", "1.0", "--out-dir", str(tmp_path)]
        )
        assert code == 2


class TestConfigFile:
    def parse(self, command, *flags):
        return cli.build_parser().parse_args([command, *flags])

    def test_layering(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(
            "# comment line\n"
            "theta0 10.5\n"
            "lr = 3.0\n"
            "\n"
            "iters 7  # trailing comment\n"
        )
        args = self.parse("track", "--config", str(cfg_file), "--lr", "4.0")
        resolved = cli._resolve(args, "track")
        assert resolved["theta0"] == 10.5  # from file
        assert resolved["lr"] == 4.0  # flag beats file
        assert resolved["iters"] == 7
        assert resolved["tolerance"] == 1e-4  # untouched default

    def test_unknown_key(self, tmp_path):
        cfg_file = tmp_path / "bad.cfg"
        cfg_file.write_text("banana 3\n")
        args = self.parse("track", "--config", str(cfg_file))
        with pytest.raises(cli.UsageError):
            cli._resolve(args, "track")

    def test_unreadable_file(self, tmp_path):
        args = self.parse("track", "--config", str(tmp_path / "missing.cfg"))
        with pytest.raises(cli.UsageError):
            cli._resolve(args, "track")

    def test_joint_defaults_differ_from_shared(self):
        args = self.parse("joint")
        resolved = cli._resolve(args, "joint")
        assert resolved["theta-max"] == 32.0
        assert resolved["epochs"] == 700
        args = self.parse("track")
        resolved = cli._resolve(args, "track")
        assert resolved["theta-max"] == 64.0
        assert resolved["theta-min"] == 4.0


class TestWavInfo:
    def test_reports_fields(self, tmp_path, capsys):
        from conftest import build_wav

        path = tmp_path / "a.wav"
        path.write_bytes(build_wav([0, 1000, -1000], sample_rate=44100))
        assert cli.main(["wav-info", str(path)]) == 0
        out = capsys.readouterr().out
        assert "sample_rate: 44100 Hz" in out
        assert "samples: 3" in out

    def test_missing_file(self, tmp_path, capsys):
        assert cli.main(["wav-info", str(tmp_path / "nope.wav")]) == 1

    def test_unsupported_file(self, tmp_path, capsys):
        from conftest import build_wav

        path = tmp_path / "stereo.wav"
        path.write_bytes(build_wav([0, 0], channels=2))
        assert cli.main(["wav-info", str(path)]) == 1
        assert "channels" in capsys.readouterr().err


class TestGradcheckCommand:
    def test_writes_report_and_succeeds(self, tmp_path, capsys):
        code = cli.main(
            ["gradcheck", "--variant", "fixed-overlap", "--out-dir", str(tmp_path)]
        )
        assert code == 0
        rows = read_rows(tmp_path / "gradcheck.csv")
        assert rows[0] == [
            "case", "variant", "theta", "analytic", "numeric", "rel_error", "pass",
        ]
        assert len(rows) == 7  # header + six cases
        assert all(row[-1] == "true" for row in rows[1:])
        assert "6/6 passed" in capsys.readouterr().out

    def test_corrupt_mode_fails(self, tmp_path, capsys):
        code = cli.main(
            ["gradcheck", "--variant", "fixed-size", "--corrupt",
             "--out-dir", str(tmp_path)]
        )
        assert code == 1
        rows = read_rows(tmp_path / "gradcheck.csv")
        assert all(row[-1] == "false" for row in rows[1:])


SMALL_TRACK = [
    "--dataset-size", "4", "--n-samples", "256", "--iters", "10",
    "--grid-steps", "5", "--theta0", "12.0",
]


class TestTrackCommand:
    def test_artifacts(self, tmp_path, capsys):
        code = cli.main(["track", "--out-dir", str(tmp_path), *SMALL_TRACK])
        assert code == 0
        trace = read_rows(tmp_path / "trace.csv")
        assert trace[0] == ["iter", "theta", "loss", "grad_theta"]
        assert trace[1][0] == "0" and trace[1][1] == "12.0"
        track = read_rows(tmp_path / "track.csv")
        assert track[0] == [
            "frame", "estimate_bin", "truth_bin", "estimate_hz", "truth_hz",
        ]
        # hz columns are the bin columns rescaled by sample_rate / support_n
        est_bin, est_hz = float(track[1][1]), float(track[1][3])
        assert est_hz == pytest.approx(est_bin * 512.0 / 64.0)
        sweep = read_rows(tmp_path / "sweep.csv")
        assert len(sweep) == 6
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["command"] == "track"
        assert manifest["seed"] == 0
        assert manifest["backend"] in ("numba", "numpy")

    def test_non_finite_abort_writes_partial_trace(self, tmp_path, capsys, monkeypatch):
        partial = OptimTrace(
            [
                TraceRecord(0, 12.0, 5.0, -1.0),
                TraceRecord(1, 13.0, float("nan"), 0.0),
            ]
        )

        def exploding(*args, **kwargs):
            raise NonFiniteLossError("loss went non-finite", trace=partial)

        monkeypatch.setattr(cli, "run_tracking", exploding)
        code = cli.main(["track", "--out-dir", str(tmp_path), *SMALL_TRACK])
        assert code == 1
        assert "non-finite" in capsys.readouterr().err
        rows = read_rows(tmp_path / "trace.csv")
        assert len(rows) == 3
        assert rows[2][1] == "13.0"


class TestJointCommand:
    def test_artifacts(self, tmp_path, capsys):
        code = cli.main(
            ["joint", "--out-dir", str(tmp_path), "--epochs", "5",
             "--train-size", "2", "--n-samples", "256"]
        )
        assert code == 0
        rows = read_rows(tmp_path / "trace.csv")
        assert rows[0][0] == "epoch"
        assert len(rows) == 7  # header + epochs 0..5
        assert "cross-entropy" in capsys.readouterr().out


class TestDeterminism:
    def run_twice(self, argv_tail, names):
        outputs = []
        for run in ("a", "b"):
            out_dir = self.tmp_path / run
            assert cli.main([*argv_tail, "--out-dir", str(out_dir)]) == 0
            outputs.append({n: (out_dir / n).read_bytes() for n in names})
        return outputs

    @pytest.fixture(autouse=True)
    def _tmp(self, tmp_path):
        self.tmp_path = tmp_path

    def test_sweep_outputs_are_byte_identical(self, capsys):
        argv = ["sweep", "--dataset-size", "4", "--n-samples", "256",
                "--grid-steps", "5"]
        a, b = self.run_twice(argv, ["sweep.csv"])
        assert a == b

    def test_track_outputs_are_byte_identical(self, capsys):
        argv = ["track", *SMALL_TRACK]
        a, b = self.run_twice(argv, ["trace.csv", "track.csv", "sweep.csv"])
        assert a == b

    def test_seed_changes_sweep_output(self, capsys):
        argv = ["sweep", "--dataset-size", "4", "--n-samples", "256",
                "--grid-steps", "5"]
        dir_a, dir_b = self.tmp_path / "s0", self.tmp_path / "s1"
        assert cli.main([*argv, "--out-dir", str(dir_a)]) == 0
        assert cli.main([*argv, "--seed", "9", "--out-dir", str(dir_b)]) == 0
        assert (dir_a / "sweep.csv").read_bytes() != (dir_b / "sweep.csv").read_bytes()
