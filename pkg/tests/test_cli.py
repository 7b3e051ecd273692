"""Command-line interface: files written, exit codes, determinism."""

import numpy as np
import pytest

import fracwave.cli as cli
from fracwave.cli import main
from fracwave.coeffs import riesz_coeffs_1d
from fracwave.errors import SolverError
from fracwave.snapshots import read_snapshot_raw


def read_snapshot_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    n = int(data[:, 0].max())
    field = np.zeros((n, n))
    for i, j, v in data:
        field[int(i) - 1, int(j) - 1] = v
    return field


def strip_timing(text: str) -> str:
    return "\n".join(line for line in text.splitlines()
                     if not line.startswith("# timing"))


SOLVE_SMALL = ["solve", "--example", "sine-gordon", "--alpha", "1.5",
               "--tau", "0.1", "--t-final", "0.4", "--n", "11"]


class TestSolve:
    def test_writes_summary_and_snapshots(self, tmp_path, capsys):
        rc = main(SOLVE_SMALL + ["--out-dir", str(tmp_path),
                                 "--snapshots", "0,0.2,0.4"])
        assert rc == 0
        summary = (tmp_path / "summary.txt").read_text()
        assert "final_max_abs" in summary
        assert "snapshots_written = 3" in summary
        assert capsys.readouterr().out == summary
        for label in ("0", "0.2", "0.4"):
            snap = tmp_path / f"snap_t{label}.csv"
            assert snap.exists()
            field = read_snapshot_csv(snap)
            assert field.shape == (11, 11)
        # t = 0 snapshot holds the initial displacement: zero for this model
        assert np.all(read_snapshot_csv(tmp_path / "snap_t0.csv") == 0.0)

    def test_deterministic_output(self, tmp_path):
        d1, d2 = tmp_path / "one", tmp_path / "two"
        args = SOLVE_SMALL + ["--snapshots", "0.4"]
        assert main(args + ["--out-dir", str(d1)]) == 0
        assert main(args + ["--out-dir", str(d2)]) == 0
        s1 = (d1 / "snap_t0.4.csv").read_bytes()
        s2 = (d2 / "snap_t0.4.csv").read_bytes()
        assert s1 == s2
        r1 = strip_timing((d1 / "summary.txt").read_text())
        r2 = strip_timing((d2 / "summary.txt").read_text())
        assert r1 == r2
        assert r1 != (d1 / "summary.txt").read_text()  # timing block present

    def test_raw_format_round_trips(self, tmp_path):
        d1, d2 = tmp_path / "csv", tmp_path / "raw"
        args = SOLVE_SMALL + ["--snapshots", "0.4"]
        assert main(args + ["--out-dir", str(d1)]) == 0
        assert main(args + ["--format", "raw", "--out-dir", str(d2)]) == 0
        from_csv = read_snapshot_csv(d1 / "snap_t0.4.csv")
        field, meta = read_snapshot_raw(d2 / "snap_t0.4")
        np.testing.assert_allclose(field, from_csv, atol=1e-15)
        assert int(meta["n"]) == 11
        assert meta["surface"] == "u"
        assert float(meta["t"]) == pytest.approx(0.4)
        assert float(meta["alpha"]) == 1.5

    def test_surface_transform_applied(self, tmp_path):
        d1, d2 = tmp_path / "u", tmp_path / "s"
        args = SOLVE_SMALL + ["--snapshots", "0.4"]
        assert main(args + ["--out-dir", str(d1)]) == 0
        assert main(args + ["--surface", "sin_half_u", "--out-dir", str(d2)]) == 0
        u = read_snapshot_csv(d1 / "snap_t0.4.csv")
        s = read_snapshot_csv(d2 / "snap_t0.4.csv")
        np.testing.assert_allclose(s, np.sin(u / 2.0), atol=1e-12)

    def test_energy_block_only_without_forcing(self, tmp_path):
        rc = main(["solve", "--example", "zero", "--alpha", "1.5",
                   "--tau", "0.1", "--t-final", "0.3", "--n", "9",
                   "--out-dir", str(tmp_path)])
        assert rc == 0
        summary = (tmp_path / "summary.txt").read_text()
        assert "energy_relative_drift" in summary
        drift = float([ln.split("=")[1] for ln in summary.splitlines()
                       if ln.startswith("energy_relative_drift")][0])
        assert drift <= 1e-10

    def test_outdir_env_variable(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path / "envdir"))
        assert main(SOLVE_SMALL) == 0
        assert (tmp_path / "envdir" / "summary.txt").exists()

    def test_flag_overrides_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path / "envdir"))
        assert main(SOLVE_SMALL + ["--out-dir", str(tmp_path / "flagdir")]) == 0
        assert (tmp_path / "flagdir" / "summary.txt").exists()
        assert not (tmp_path / "envdir").exists()


class TestExitCodes:
    def test_validation_bad_alpha(self, tmp_path, capsys):
        rc = main(["solve", "--example", "sine-gordon", "--alpha", "2.5",
                   "--tau", "0.1", "--t-final", "0.2", "--n", "9",
                   "--out-dir", str(tmp_path)])
        assert rc == 2
        assert "error:" in capsys.readouterr().err

    def test_validation_non_dividing_spacing(self, tmp_path):
        rc = main(["solve", "--example", "sine-gordon", "--alpha", "1.5",
                   "--tau", "0.1", "--t-final", "0.2", "--h", "0.3",
                   "--out-dir", str(tmp_path)])
        assert rc == 2

    def test_validation_misaligned_snapshot(self, tmp_path):
        rc = main(SOLVE_SMALL + ["--snapshots", "0.33",
                                 "--out-dir", str(tmp_path)])
        assert rc == 2

    def test_solver_failure_maps_to_three(self, tmp_path, monkeypatch):
        def boom(*a, **k):
            raise SolverError("iteration limit reached")
        monkeypatch.setattr(cli, "run", boom)
        rc = main(SOLVE_SMALL + ["--out-dir", str(tmp_path)])
        assert rc == 3

    def test_blow_up_exits_four(self, tmp_path, capsys):
        # kappa = 0 reduces the update to an explicit pointwise recurrence;
        # a huge step on the cubic model then grows past the guard quickly
        rc = main(["solve", "--example", "klein-gordon", "--kappa", "0",
                   "--alpha", "1.5", "--tau", "4", "--t-final", "40",
                   "--n", "15", "--out-dir", str(tmp_path)])
        assert rc == 4
        assert "blow-up" in capsys.readouterr().err

    def test_io_failure_exits_five(self, tmp_path):
        blocker = tmp_path / "not_a_dir"
        blocker.write_text("occupied")
        rc = main(SOLVE_SMALL + ["--out-dir", str(blocker)])
        assert rc == 5


class TestStudyCommands:
    def test_study_time_small(self, tmp_path, capsys):
        out = tmp_path / "rows.csv"
        rc = main(["study-time", "--example", "sine-gordon",
                   "--alphas", "1.5", "--taus", "1/5", "--h", "1/2",
                   "--t-final", "0.4", "--out", str(out)])
        assert rc == 0
        assert "wrote 1 rows" in capsys.readouterr().err
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("scheme,alpha,step,error,order")
        assert len(lines) == 2
        assert lines[1].split(",")[2] == "0.2"

    def test_study_space_default_output_name(self, tmp_path):
        rc = main(["study-space", "--example", "sine-gordon",
                   "--alphas", "1.5", "--hs", "1/2,1/4", "--tau", "1/10",
                   "--t-final", "0.2", "--out-dir", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "study_space.csv").read_text().strip().splitlines()
        assert len(lines) == 3

    def test_study_spec_file_with_flag_override(self, tmp_path, capsys):
        spec = tmp_path / "study.txt"
        spec.write_text("example = sine-gordon\nalphas = 1.1\n"
                        "taus = 1/5\nhs = 1/2\nt-final = 0.4\n")
        out = tmp_path / "o.csv"
        rc = main(["study-time", "--spec", str(spec),
                   "--alphas", "1.9", "--out", str(out)])
        assert rc == 0
        rows = out.read_text().strip().splitlines()[1:]
        assert all(r.split(",")[1] == "1.9" for r in rows)


class TestCoeffsCommand:
    def test_1d_to_stdout(self, capsys):
        rc = main(["coeffs", "--alpha", "1.5", "--count", "3",
                   "--kind", "1d", "--out", "-"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "i,j,value"
        assert len(lines) == 4
        w = riesz_coeffs_1d(1.5, 3).weights
        for k, line in enumerate(lines[1:]):
            i, j, v = line.split(",")
            assert (int(i), int(j)) == (k, 0)
            assert float(v) == pytest.approx(w[k], rel=1e-15)

    def test_2d_to_file(self, tmp_path):
        out = tmp_path / "c.csv"
        rc = main(["coeffs", "--alpha", "1.5", "--count", "4",
                   "--kind", "2d", "--oversampling", "64", "--out", str(out)])
        assert rc == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 17
        first = lines[1].split(",")
        assert float(first[2]) == pytest.approx(2.7470661362816475, abs=1e-6)

    def test_classical_alpha_allowed(self, capsys):
        rc = main(["coeffs", "--alpha", "2", "--count", "2",
                   "--kind", "1d", "--out", "-"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert float(lines[1].split(",")[2]) == pytest.approx(2.0, abs=1e-13)

    def test_bad_count_rejected(self):
        assert main(["coeffs", "--alpha", "1.5", "--count", "0",
                     "--kind", "1d", "--out", "-"]) == 2


class TestSelftestCommand:
    def test_passes_and_is_deterministic(self, capsys):
        rc1 = main(["selftest"])
        out1 = capsys.readouterr().out
        rc2 = main(["selftest"])
        out2 = capsys.readouterr().out
        assert rc1 == rc2 == 0
        assert out1 == out2
        check_lines = [ln for ln in out1.splitlines() if ln.startswith("PASS")]
        assert len(check_lines) >= 10
        assert not any(ln.startswith("FAIL") for ln in out1.splitlines())

    def test_fault_injection_is_caught(self, capsys):
        rc = main(["selftest", "--fault", "coeffs"])
        out = capsys.readouterr().out
        assert rc == 1
        fails = [ln for ln in out.splitlines() if ln.startswith("FAIL")]
        assert len(fails) == 1
        assert "coeff" in fails[0]
