"""Snapshot writers: CSV layout, raw round trips, surface transforms."""

import numpy as np
import pytest

from fracwave.errors import ValidationError
from fracwave.snapshots import (
    SURFACE_NAMES,
    apply_surface,
    read_snapshot_raw,
    write_snapshot_csv,
    write_snapshot_raw,
)


class TestCsv:
    def test_layout_and_precision(self, tmp_path, rng):
        field = rng.standard_normal((3, 3))
        path = tmp_path / "field.csv"
        write_snapshot_csv(path, field)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "i,j,value"
        assert len(lines) == 10
        # indices are 1-based, values survive a full float64 round trip
        i, j, v = lines[1].split(",")
        assert (i, j) == ("1", "1")
        assert float(v) == field[0, 0]
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        got = np.zeros((3, 3))
        for row in data:
            got[int(row[0]) - 1, int(row[1]) - 1] = row[2]
        np.testing.assert_array_equal(got, field)


class TestRaw:
    def test_bit_exact_round_trip(self, tmp_path):
        field = np.array([[0.0, -0.0, 5e-324],
                          [np.pi, -1.0 / 3.0, 1e300],
                          [2.0 ** -1022, 1.5, -7.25]])
        base = tmp_path / "snap_t2.5"  # dotted label must survive
        write_snapshot_raw(base, field, h=0.5, t=2.5, alpha=1.5, kappa=1.0,
                           nonlinearity="sine_gordon", surface="u")
        assert (tmp_path / "snap_t2.5.f64").exists()
        assert (tmp_path / "snap_t2.5.meta").exists()
        back, meta = read_snapshot_raw(base)
        assert back.dtype == np.float64
        np.testing.assert_array_equal(back, field)
        assert np.signbit(back[0, 1])
        assert int(meta["n"]) == 3
        assert float(meta["h"]) == 0.5
        assert meta["nonlinearity"] == "sine_gordon"

    def test_meta_records_configuration(self, tmp_path):
        field = np.zeros((2, 2))
        base = tmp_path / "run_t0"
        write_snapshot_raw(base, field, h=0.25, t=0.0, alpha=1.9, kappa=2.0,
                           nonlinearity="zero", surface="sin_u")
        _, meta = read_snapshot_raw(base)
        assert float(meta["alpha"]) == 1.9
        assert float(meta["kappa"]) == 2.0
        assert meta["surface"] == "sin_u"
        assert float(meta["t"]) == 0.0


class TestSurface:
    def test_kinds(self, rng):
        u = rng.standard_normal((4, 4))
        np.testing.assert_array_equal(apply_surface("u", u), u)
        np.testing.assert_allclose(apply_surface("sin_u", u), np.sin(u),
                                   atol=1e-15)
        np.testing.assert_allclose(apply_surface("sin_half_u", u),
                                   np.sin(u / 2.0), atol=1e-15)
        assert set(SURFACE_NAMES) == {"u", "sin_u", "sin_half_u"}

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            apply_surface("cos_u", np.zeros((2, 2)))
