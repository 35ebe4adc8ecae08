"""CLI behavior: exit codes, output formats, and determinism."""

import json
import math

import numpy as np
import pytest

from prelog_lab import bounds, spectra, toeplitz
from prelog_lab.cli import main, parse_grid, parse_model
from prelog_lab.errors import DomainError
from prelog_lab.processes import read_path_binary


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_rows(text):
    lines = [l for l in text.strip().split("\n") if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


class TestParsing:
    def test_grid_forms(self):
        assert parse_grid("100") == [100.0]
        assert parse_grid("1,10,100") == [1.0, 10.0, 100.0]
        grid = parse_grid("1e2:1e10:9")
        assert len(grid) == 9
        assert grid[0] == 1e2 and grid[-1] == 1e10
        ratios = [b / a for a, b in zip(grid, grid[1:])]
        assert all(r == pytest.approx(10.0, rel=1e-9) for r in ratios)

    def test_grid_guards(self):
        for bad in ("1:2", "1e4:1e2:5", "0:10:3", "1:4:1"):
            with pytest.raises(DomainError):
                parse_grid(bad)

    def test_model_specs(self):
        assert parse_model("rayleigh-band:W=0.1").name == "rayleigh-band:W=0.1"
        assert parse_model("onoff:W=0.0625").mass_at_zero == 0.5
        assert parse_model("phase-noise").kind == "phase"

    def test_model_guards(self):
        for bad in ("nosuch", "rayleigh-band", "rayleigh-band:V=1",
                    "rayleigh-band:W=0.1,extra=2", "phase-noise:W=1",
                    "custom:tail=rayleigh", "onoff:W"):
            with pytest.raises(DomainError):
                parse_model(bad)


class TestExitCodes:
    def test_unknown_model_is_usage(self, capsys):
        code, _, err = run(capsys, ["bound-sweep", "--model", "nosuch:W=1"])
        assert code == 2
        assert "unknown model" in err

    def test_bad_flag_is_usage(self, capsys):
        assert run(capsys, ["bound-sweep", "--nope"])[0] == 2

    def test_missing_command_is_usage(self, capsys):
        assert run(capsys, [])[0] == 2

    def test_help_is_ok(self, capsys):
        assert run(capsys, ["--help"])[0] == 0

    def test_unwritable_output_is_io(self, capsys):
        code, _, err = run(
            capsys,
            ["spectrum", "--model", "rayleigh-band:W=0.1",
             "--out", "/nonexistent/dir/x.csv"],
        )
        assert code == 3
        assert "i/o" in err

    def test_ok_is_zero(self, capsys):
        assert run(capsys, ["miso", "--spectra", "W=0.1"])[0] == 0


class TestSpectrumCommand:
    def test_onoff_scalars(self, capsys, tmp_path):
        out = tmp_path / "s.json"
        code, _, _ = run(
            capsys,
            ["spectrum", "--model", "onoff:W=0.0625", "--format", "json",
             "--out", str(out)],
        )
        assert code == 0
        obj = json.loads(out.read_text())
        assert obj["zero_set_measure"] == 0.75
        assert obj["limiting_ratio"] == 0.25
        assert len(obj["rows"]) == 5
        lows = [row["lo"] for row in obj["rows"]]
        assert lows[0] == -0.5


class TestBoundSweepCommand:
    def test_matches_library(self, capsys):
        code, out, _ = run(
            capsys,
            ["bound-sweep", "--model", "rayleigh-band:W=0.05",
             "--snr", "1e2:1e10:9"],
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["snr", "lb", "upsilon_star", "ub_coherent"]
        assert len(rows) == 9
        model = bounds.rayleigh_band_model(0.05)
        for row in rows:
            snr = float(row["snr"])
            star, lb = bounds.optimize_upsilon(
                model, snr, bounds.default_upsilon_grid()
            )
            assert float(row["lb"]) == lb
            assert float(row["upsilon_star"]) == star
            assert float(row["ub_coherent"]) == bounds.coherent_avg_upper_bound(model, snr)

    def test_phase_model_columns(self, capsys):
        code, out, _ = run(
            capsys, ["bound-sweep", "--model", "phase-noise", "--snr", "1e2,1e4"]
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert rows[0]["upsilon_star"] == ""
        assert float(rows[1]["lb"]) == bounds.phase_noise_lower_bound(1e4)
        assert float(rows[1]["ub_coherent"]) == bounds.phase_noise_upper_bound(1e4)

    def test_json_equals_csv(self, capsys, tmp_path):
        argv = ["bound-sweep", "--model", "rayleigh-band:W=0.1", "--snr", "1e2:1e6:5"]
        _, csv_out, _ = run(capsys, argv)
        jpath = tmp_path / "o.json"
        run(capsys, argv + ["--format", "json", "--out", str(jpath)])
        obj = json.loads(jpath.read_text())
        _, rows = csv_rows(csv_out)
        for crow, jrow in zip(rows, obj["rows"]):
            assert float(crow["lb"]) == jrow["lb"]
            assert float(crow["snr"]) == jrow["snr"]

    def test_byte_identical_reruns(self, capsys):
        argv = ["bound-sweep", "--model", "onoff:W=0.0625", "--snr", "1e2:1e8:7",
                "--threads", "8"]
        _, first, _ = run(capsys, argv)
        _, second, _ = run(capsys, argv)
        assert first == second


class TestPrelogReportCommand:
    def test_onoff_note1_gap(self, capsys):
        code, out, _ = run(
            capsys,
            ["prelog-report", "--model", "onoff:W=0.0625", "--snr", "1e4:1e8:3"],
        )
        assert code == 0
        assert "# note1-gap=true" in out
        assert "# upper_prelog=0.5" in out
        assert "# analytic_limit=" in out
        assert "# zero_set_measure=0.75" in out

    def test_band_limits(self, capsys):
        code, out, _ = run(
            capsys,
            ["prelog-report", "--model", "rayleigh-band:W=0.1", "--snr", "1e4:1e10:4"],
        )
        assert code == 0
        assert "# analytic_limit=0.8" in out
        assert "# note1-gap=false" in out
        _, rows = csv_rows(out)
        ratios = [float(r["ratio"]) for r in rows]
        assert ratios == sorted(ratios)

    def test_phase_limits(self, capsys):
        code, out, _ = run(capsys, ["prelog-report", "--model", "phase-noise"])
        assert code == 0
        assert "# analytic_limit=0.5" in out
        assert "# upper_prelog=0.5" in out


class TestSzegoCommand:
    def test_gap_column_decreases(self, capsys):
        code, out, _ = run(
            capsys,
            ["szego", "--model", "rayleigh-band:W=0.25", "--snr", "100",
             "--n", "16,64,128"],
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["n", "rate", "integral", "gap"]
        gaps = [float(r["gap"]) for r in rows]
        assert gaps[-1] < gaps[0]
        S = spectra.make_rect_band(0.25)
        for row in rows:
            n = int(row["n"])
            assert float(row["rate"]) == toeplitz.szego_logdet_rate(S, 100.0, n)

    def test_multiple_snr_rejected(self, capsys):
        code, _, err = run(
            capsys,
            ["szego", "--model", "rayleigh-band:W=0.25", "--snr", "10,100"],
        )
        assert code == 2

    def test_cap_respected(self, capsys):
        code, _, _ = run(
            capsys,
            ["szego", "--model", "rayleigh-band:W=0.25", "--snr", "100",
             "--n", "64", "--max-n", "32"],
        )
        assert code == 2


class TestSimulateCommand:
    def test_onoff_structure_and_table(self, capsys, tmp_path):
        pfile = tmp_path / "path.csv"
        code, out, _ = run(
            capsys,
            ["simulate", "--model", "onoff:W=0.0625", "--n", "20000", "--seed", "7",
             "--path-out", str(pfile), "--m-max", "4"],
        )
        assert code == 0
        assert "# nonzero_fraction=0.5" in out
        header, rows = csv_rows(out)
        assert header == ["m", "emp_re", "emp_im", "analytic_re", "analytic_im", "abs_err"]
        assert len(rows) == 5
        assert float(rows[1]["analytic_re"]) == 0.0
        # path file carries the parity structure
        lines = pfile.read_text().strip().split("\n")[1:]
        vals = np.array([complex(float(a), float(b))
                         for _, a, b in (l.split(",") for l in lines)])
        dead_even = np.all(vals[0::2] == 0)
        dead_odd = np.all(vals[1::2] == 0)
        assert dead_even != dead_odd

    def test_binary_path_out(self, capsys, tmp_path):
        pfile = tmp_path / "path.bin"
        code, _, _ = run(
            capsys,
            ["simulate", "--model", "phase-noise", "--n", "512", "--seed", "3",
             "--path-out", str(pfile), "--m-max", "2"],
        )
        assert code == 0
        back = read_path_binary(str(pfile))
        assert back.n == 512
        assert back.seed == 3
        assert np.all(np.abs(back.values) == 1.0)


class TestMisoCommand:
    def test_example(self, capsys):
        code, out, _ = run(capsys, ["miso", "--spectra", "W=0.1,W=0.2"])
        assert code == 0
        assert "# prelog_lower=0.8" in out
        _, rows = csv_rows(out)
        assert [float(r["zero_set_measure"]) for r in rows] == [0.8, 0.6]

    def test_spectrum_file_antenna(self, capsys, tmp_path):
        sfile = tmp_path / "flat.json"
        sfile.write_text(spectra.make_rect_band(0.5).to_json())
        code, out, _ = run(capsys, ["miso", "--spectra", f"W=0.3,{sfile}"])
        assert code == 0
        assert "# prelog_lower=0.4" in out


class TestConfigOverride:
    def test_config_unknown_key_is_usage(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "rayleigh-band:W=0.25", "snr": "100"}))
        code, out, _ = run(
            capsys,
            ["spectrum", "--model", "onoff:W=0.0625", "--config", str(cfg)],
        )
        # spectrum has no --snr flag, so the config key is a usage error
        assert code == 2

    def test_config_override_applies(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"model": "rayleigh-band:W=0.25"}))
        code, out, _ = run(
            capsys,
            ["spectrum", "--model", "onoff:W=0.0625", "--config", str(cfg)],
        )
        assert code == 0
        assert "# model=rayleigh-band:W=0.25" in out

    def test_missing_config_is_io(self, capsys):
        code, _, _ = run(
            capsys,
            ["spectrum", "--model", "phase-noise", "--config", "/nope/c.json"],
        )
        assert code == 3

    def test_malformed_config_is_usage(self, capsys, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text("{broken")
        code, _, _ = run(
            capsys,
            ["spectrum", "--model", "phase-noise", "--config", str(cfg)],
        )
        assert code == 2


class TestThreadsEnv:
    def test_env_cap_keeps_output_stable(self, capsys, monkeypatch):
        argv = ["bound-sweep", "--model", "rayleigh-band:W=0.1",
                "--snr", "1e2:1e6:5", "--threads", "8"]
        _, unlimited, _ = run(capsys, argv)
        monkeypatch.setenv("PRELOG_LAB_THREADS", "1")
        _, capped, _ = run(capsys, argv)
        assert unlimited == capped

    def test_bad_env_value_is_usage(self, capsys, monkeypatch):
        monkeypatch.setenv("PRELOG_LAB_THREADS", "soon")
        code, _, _ = run(
            capsys,
            ["bound-sweep", "--model", "rayleigh-band:W=0.1", "--snr", "1e2,1e4"],
        )
        assert code == 2


def test_float_formatting_is_lossless():
    # repr round-trips doubles exactly, the invariant the CSV layer relies on
    vals = [math.pi, 1e-300, 2.651652454029538, 7.254329119262048]
    for v in vals:
        assert float(repr(v)) == v


class TestManual:
    def test_manual_covers_every_command(self, capsys):
        code, out, _ = run(capsys, ["manual"])
        assert code == 0
        assert out.startswith("PRELOG-LAB(1)")
        for name in ("spectrum", "bound-sweep", "prelog-report", "szego",
                     "simulate", "miso", "manual"):
            assert f"COMMAND: {name}" in out

    def test_manual_documents_defaults(self, capsys):
        _, out, _ = run(capsys, ["manual"])
        assert "(default: 1e2:1e10:9)" in out
        assert "(default: 1e4:1e10:4)" in out
        assert "(default: csv)" in out
        assert "(default: 32,64,128)" in out
        assert "(default: 100000)" in out
        assert "PRELOG_LAB_THREADS" in out

    def test_manual_to_file(self, tmp_path, capsys):
        target = tmp_path / "man.txt"
        code, out, _ = run(capsys, ["manual", "--out", str(target)])
        assert code == 0
        assert out == ""
        assert "GLOBAL USAGE" in target.read_text()

    def test_help_shows_defaults(self, capsys):
        code, out, _ = run(capsys, ["bound-sweep", "--help"])
        assert code == 0
        assert "(default: 1e2:1e10:9)" in out
