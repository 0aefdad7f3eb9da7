import json
import math
import re

import numpy as np
import pytest

from mvlb.experiments import ExperimentRecord
from mvlb.io import (
    IoError,
    load_state,
    read_raw,
    read_sidecar,
    read_snapshot,
    save_state,
    write_sidecar,
    write_snapshot,
)
from mvlb.report import emit_report, read_json, slope_fit, write_csv
from mvlb.spectral import Grid, ScalarField, VectorField
from mvlb.steady import Lattice, VortexSpec, assemble_multivortex


def record(i=0, **kw):
    base = dict(study="scaling", case="ekman-II", nu=1.0, mu=1.0, L=8.0, count=2**i, box=8.0 * 2 ** (i / 2),
                n=128, grashof=1.5e5 * 2**i, unstable_count=2 * 2**i,
                leading_eigenvalues=[[3.94, 4.1], [3.94, -4.1]], cluster_radius=1e-3 / (i + 1),
                neutral_radius=float("nan"), amplitude=150.0, seed=0, config_hash="abc123", wall_time=1.25,
                extra={"threshold": 1.97, "capped": False})
    base.update(kw)
    return ExperimentRecord(**base)


class TestSnapshots:
    def test_round_trip_vector(self, tmp_path, rng):
        g = Grid(32, 3.5)
        f = VectorField(g, rng.standard_normal((2, 32, 32)))
        write_snapshot(tmp_path / "v.mvlb", f)
        back = read_snapshot(tmp_path / "v.mvlb")
        assert back.grid == g and np.array_equal(back.values, f.values)

    def test_round_trip_complex_and_scalar(self, tmp_path, rng):
        g = Grid(32, 1.0)
        c = VectorField(g, rng.standard_normal((2, 32, 32)) + 1j * rng.standard_normal((2, 32, 32)))
        write_snapshot(tmp_path / "c.mvlb", c)
        assert np.array_equal(read_snapshot(tmp_path / "c.mvlb", complex_values=True).values, c.values)
        s = ScalarField(g, rng.standard_normal((32, 32)))
        write_snapshot(tmp_path / "s.mvlb", s)
        assert isinstance(read_snapshot(tmp_path / "s.mvlb"), ScalarField)

    def test_layout(self, tmp_path):
        g = Grid(32, 2.0)
        p = write_snapshot(tmp_path / "z.mvlb", VectorField.zeros(g))
        data = p.read_bytes()
        assert data[:4] == b"MVLB" and len(data) == 24 + 2 * 32 * 32 * 8

    @pytest.mark.parametrize("payload", [b"", b"NOPE" + bytes(40), b"MVLB" + bytes(20) + bytes(8)])
    def test_corrupt_files(self, tmp_path, payload):
        (tmp_path / "bad.mvlb").write_bytes(payload)
        with pytest.raises(IoError) as exc:
            read_raw(tmp_path / "bad.mvlb")
        assert "bad.mvlb" in str(exc.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            read_snapshot(tmp_path / "missing.mvlb")


class TestSidecar:
    def test_round_trip(self, tmp_path):
        rec = {"a": 150.0, "family": "counter-rotating-ring", "offsets": [[4.0, 4.0]], "lam": complex(1, 2),
               "n": np.int64(3), "x": np.float64(0.1)}
        write_sidecar(tmp_path / "m.meta", rec)
        back = read_sidecar(tmp_path / "m.meta")
        assert back == {"a": 150.0, "family": "counter-rotating-ring", "offsets": [[4.0, 4.0]],
                        "lam": complex(1, 2), "n": 3, "x": 0.1}
        assert all("=" in line for line in (tmp_path / "m.meta").read_text().splitlines())

    def test_malformed(self, tmp_path):
        (tmp_path / "m.meta").write_text("no separator here\n")
        with pytest.raises(IoError):
            read_sidecar(tmp_path / "m.meta")

    def test_state_round_trip(self, tmp_path):
        st = assemble_multivortex(Grid(64, 16.0), VortexSpec(amplitude=3.0), Lattice.square(2, 8.0), 1.0, 0.5)
        save_state(tmp_path, st)
        back = load_state(tmp_path)
        assert np.array_equal(back.velocity.values, st.velocity.values)
        assert np.array_equal(back.forcing.values, st.forcing.values)
        assert back.lattice == st.lattice and back.spec == st.spec and back.mu == 0.5


class TestReport:
    def test_slope_fit_exact(self):
        x = np.array([1.0, 2.0, 4.0, 8.0])
        s, h, b = slope_fit(x, 3 * x**0.75)
        assert s == pytest.approx(0.75, abs=1e-12) and h == pytest.approx(0.0, abs=1e-9)
        assert b == pytest.approx(math.log(3))

    def test_slope_fit_two_points(self):
        s, h, _ = slope_fit([1, 2], [1, 4])
        assert s == pytest.approx(2.0) and math.isnan(h)

    def test_csv_single_record(self, tmp_path):
        p = emit_report([record()], "csv", tmp_path / "r.csv")
        lines = p.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("study,case,nu,mu,L,count,box,n,grashof,unstable_count")

    def test_csv_column_order_stable(self, tmp_path):
        a = write_csv([record(0), record(1)], tmp_path / "a.csv").read_text().splitlines()[0]
        b = write_csv([record(1), record(0)], tmp_path / "b.csv").read_text().splitlines()[0]
        assert a == b

    def test_json_round_trip(self, tmp_path):
        recs = [record(i) for i in range(3)]
        p = emit_report(recs, "json", tmp_path / "r.json")
        back = [ExperimentRecord.from_dict(d) for d in read_json(p)]
        for r, s in zip(recs, back):
            a, b = r.to_dict(), s.to_dict()
            assert math.isnan(a.pop("neutral_radius")) and math.isnan(b.pop("neutral_radius"))
            assert a == b
        assert json.loads(p.read_text())[0]["threshold"] == 1.97

    def test_svg_slope_text(self, tmp_path):
        recs = [record(i) for i in range(4)]
        p = emit_report(recs, "svg", tmp_path / "r.svg")
        text = p.read_text()
        m = re.search(r"<text[^>]*>[^<]*slope = (-?\d+\.\d{3})\b", text, re.S)
        assert m is not None
        expected = slope_fit([r.grashof for r in recs], [r.unstable_count for r in recs])[0]
        assert m.group(1) == f"{expected:.3f}"

    def test_empty_and_unknown(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report([], "csv", tmp_path / "x.csv")
        with pytest.raises(ValueError):
            emit_report([record()], "xml", tmp_path / "x.xml")

    def test_unwritable_path(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(IoError) as exc:
            emit_report([record()], "csv", blocker / "sub" / "r.csv")
        assert "r.csv" in str(exc.value) or "sub" in str(exc.value)
