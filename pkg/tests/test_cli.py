import csv
import json
import math
import subprocess
import sys

import pytest

from pcwdesign.cli import CURVE_COLUMNS, main
from pcwdesign.constants import deg_to_rad, nm_to_um, rad_to_deg, um_to_nm
from pcwdesign.geometry import parse_geometry


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestFp:
    def test_reference(self, capsys):
        code, out, _ = run(capsys, "fp", "--h", "160", "--n", "3.46", "--lambda", "925")
        assert code == 0
        payload = json.loads(out)
        assert payload["schema_version"] == 1 and payload["kind"] == "vertical_cavity"
        assert 0.56 <= payload["result"]["F_FP"] <= 0.72

    def test_nonpositive_thickness(self, capsys):
        code, _, err = run(capsys, "fp", "--h", "0", "--n", "3.46", "--lambda", "925")
        assert code == 2 and "h must be positive" in err

    def test_missing_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["fp", "--h", "160", "--n", "3.46"])
        assert exc.value.code == 2
        assert "--lambda" in capsys.readouterr().err


class TestDesign:
    def test_reference(self, capsys, tmp_path):
        out = tmp_path / "d.json"
        assert run(capsys, "design", "--a", "238", "--lambda", "925", "--h", "160", "--out", str(out))[0] == 0
        payload = json.loads(out.read_text())
        assert 60 <= payload["result"]["r_nm"] <= 100
        assert payload["config"]["conventions"]["bragg_angle"] == "half"
        assert payload["result"]["trace"]["converged"]

    def test_infeasible(self, capsys):
        code, _, err = run(capsys, "design", "--a", "50", "--lambda", "925", "--h", "160")
        assert code == 3 and "infeasible" in err

    def test_deterministic(self, capsys):
        a = run(capsys, "design", "--a", "238", "--lambda", "925", "--h", "160")[1]
        b = run(capsys, "design", "--a", "238", "--lambda", "925", "--h", "160")[1]
        assert a == b

    def test_convention_flags(self, capsys):
        code, out, _ = run(
            capsys, "design", "--a", "238", "--lambda", "925", "--h", "160", "--fresnel-wavelength", "medium"
        )
        assert code == 0
        assert json.loads(out)["result"]["conventions"]["fresnel_wavelength"] == "medium"

    def test_full_bragg_angle_infeasible(self, capsys):
        code = run(capsys, "design", "--a", "238", "--lambda", "925", "--h", "160", "--bragg-angle", "full")[0]
        assert code == 3

    def test_material_file(self, capsys, tmp_path):
        table = tmp_path / "n.txt"
        table.write_text("wavelength_nm n\n900 3.48\n950 3.44\n")
        code, out, _ = run(
            capsys, "design", "--a", "238", "--lambda", "925", "--h", "160", "--material", str(table)
        )
        assert code == 0
        assert json.loads(out)["result"]["diagnostics"]["n"] == pytest.approx(3.46)

    def test_extrapolating_material(self, capsys, tmp_path):
        table = tmp_path / "n.txt"
        table.write_text("700 3.6\n800 3.5\n")
        code = run(capsys, "design", "--a", "238", "--lambda", "925", "--h", "160", "--material", str(table))[0]
        assert code == 2


class TestCurve:
    def test_locus(self, capsys, tmp_path):
        out = tmp_path / "c.csv"
        code = run(capsys, "curve", "--lambda", "925", "--h", "160", "--a-min", "210", "--a-max", "260",
                   "--a-step", "5", "--out", str(out))[0]
        assert code == 0
        raw = out.read_bytes()
        assert b"\r" not in raw
        rows = list(csv.DictReader(raw.decode().splitlines()))
        assert tuple(rows[0].keys()) == CURVE_COLUMNS
        assert len(rows) == 11
        feas = [r for r in rows if r["feasible"] == "1"]
        assert len(feas) >= 9
        assert all(float(r["c2"]) > 0 and math.isfinite(float(r["c2"])) for r in feas)
        rs = [float(r["r_nm"]) for r in feas]
        assert all(b > a for a, b in zip(rs, rs[1:]))

    def test_single_step(self, capsys, tmp_path):
        out = tmp_path / "c.csv"
        run(capsys, "curve", "--lambda", "925", "--h", "160", "--a-min", "238", "--a-max", "238",
            "--a-step", "1", "--out", str(out))
        assert len(out.read_text().splitlines()) == 2

    def test_infeasible_rows_blank(self, capsys, tmp_path):
        out = tmp_path / "c.csv"
        run(capsys, "curve", "--lambda", "925", "--h", "160", "--a-min", "150", "--a-max", "240",
            "--a-step", "90", "--out", str(out))
        rows = list(csv.DictReader(out.read_text().splitlines()))
        assert rows[0]["feasible"] == "0" and rows[0]["r_nm"] == ""
        assert rows[1]["feasible"] == "1"


class TestCompound:
    @pytest.mark.parametrize("l1,l2", [("920", "930"), ("925", "925"), ("930", "920")])
    def test_predicted_peak(self, capsys, l1, l2):
        code, out, _ = run(capsys, "compound", "--a1", "238", "--a2", "238", "--lambda1", l1,
                           "--lambda2", l2, "--h", "160")
        assert code == 0
        assert json.loads(out)["result"]["predicted_peak_nm"] == 925.0

    def test_failure_names_half(self, capsys):
        code, _, err = run(capsys, "compound", "--a1", "100", "--a2", "238", "--lambda1", "925",
                           "--lambda2", "925", "--h", "160")
        assert code == 3 and "half_1" in err


class TestPerturb:
    def _run(self, capsys, tmp_path, name, *extra):
        out = tmp_path / f"{name}.json"
        code = run(capsys, "perturb", "--out", str(out), *extra)[0]
        return code, out, out.with_suffix(".csv")

    def test_byte_identical(self, capsys, tmp_path):
        _, j1, c1 = self._run(capsys, tmp_path, "a", "--seed", "42", "--n-runs", "20")
        _, j2, c2 = self._run(capsys, tmp_path, "b", "--seed", "42", "--n-runs", "20")
        assert c1.read_bytes() == c2.read_bytes()
        assert j1.read_bytes() == j2.read_bytes()

    def test_zero_perturbation(self, capsys, tmp_path):
        _, j, _ = self._run(capsys, tmp_path, "z", "--delta-r-max", "0", "--n-runs", "10")
        assert json.loads(j.read_text())["result"]["summary"]["success_fraction"] == 1.0

    def test_defaults_follow_protocol(self, capsys, tmp_path):
        code, j, c = self._run(capsys, tmp_path, "d")
        assert code == 0
        payload = json.loads(j.read_text())
        assert payload["config"]["n_runs"] == 100 and payload["config"]["delta_r_max"] == 10.0
        assert "PCG64" in payload["config"]["rng"]
        assert len(c.read_text().splitlines()) == 101

    def test_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"a1": 233, "a2": 238, "n_runs": 5, "seed": 3}))
        code, j, _ = self._run(capsys, tmp_path, "f", "--config", str(cfg))
        assert code == 0
        design = json.loads(j.read_text())["result"]["design"]
        assert design["half_1"]["a_nm"] == 233

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n_run": 5}))
        code = run(capsys, "perturb", "--config", str(cfg), "--out", str(tmp_path / "x.json"))[0]
        assert code == 2


class TestExport:
    def test_uniform(self, capsys, tmp_path):
        d = tmp_path / "d.json"
        run(capsys, "design", "--a", "238", "--lambda", "925", "--h", "160", "--out", str(d))
        g = tmp_path / "g.txt"
        assert run(capsys, "export-geometry", "--design", str(d), "--rows", "3", "--cols", "4", "--out", str(g))[0] == 0
        header, holes = parse_geometry(g.read_text(encoding="utf-8"))
        assert len(holes) == 8
        assert header["theta_gr_deg"] == "60"

    def test_compound(self, capsys, tmp_path):
        d = tmp_path / "c.json"
        run(capsys, "compound", "--a1", "233", "--a2", "238", "--lambda1", "925", "--lambda2", "925",
            "--h", "160", "--out", str(d))
        g = tmp_path / "g.txt"
        run(capsys, "export-geometry", "--design", str(d), "--rows", "5", "--cols", "3", "--out", str(g))
        _, holes = parse_geometry(g.read_text())
        assert len({h.r for h in holes}) == 2

    def test_even_rows(self, capsys, tmp_path):
        d = tmp_path / "d.json"
        run(capsys, "design", "--a", "238", "--lambda", "925", "--h", "160", "--out", str(d))
        code = run(capsys, "export-geometry", "--design", str(d), "--rows", "4", "--cols", "4",
                   "--out", str(tmp_path / "g.txt"))[0]
        assert code == 2


class TestUnits:
    def test_degree_roundtrip(self):
        for deg in (30.0, 45.0, 60.0, 89.0):
            assert rad_to_deg(deg_to_rad(deg)) == pytest.approx(deg, rel=1e-15)
        assert deg_to_rad(60.0) == pytest.approx(math.pi / 3, rel=1e-15)

    def test_micrometre_roundtrip(self):
        assert um_to_nm(nm_to_um(238.0)) == pytest.approx(238.0, rel=1e-15)
        assert nm_to_um(238.0) == pytest.approx(0.238)

    def test_theta_flag_in_degrees(self, capsys):
        code, out, _ = run(capsys, "design", "--a", "238", "--lambda", "925", "--h", "160", "--theta-gr", "55")
        assert code == 0
        assert json.loads(out)["result"]["spec"]["theta_gr_deg"] == pytest.approx(55.0)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pcwdesign.cli", "fp", "--h", "160", "--n", "3.46", "--lambda", "925"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["F_FP"] == pytest.approx(0.6747520008, abs=1e-9)
