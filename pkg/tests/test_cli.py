import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from shiftcharge import Charge
from shiftcharge.cli import main
from shiftcharge.grws import GrwsParams, classify_sector
from shiftcharge.sweep import CSV_COLUMNS, SweepSpec, sweep_rows, write_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def write_charge(tmp_path, charge, name="c.json"):
    path = tmp_path / name
    path.write_text(json.dumps(charge.to_dict()))
    return str(path)


class TestClassify:
    def test_viiia(self, capsys):
        code, out = run(capsys, "classify", "--p", "2", "--N", "-1/2", "--D", "-3/4")
        assert code == 0
        assert "VIIIA" in out

    def test_special_line_json(self, capsys):
        code, out = run(capsys, "classify", "--p", "2", "--N", "1/4", "--D", "1/2", "--json")
        data = json.loads(out)
        assert data["sector"] == "IV" and data["special_line_j"] == 1
        assert data["expected_sign_pattern"] == "+,+,(0)..."

    def test_origin(self, capsys):
        _, out = run(capsys, "classify", "--p", "2", "--N", "0", "--D", "0")
        assert "origin" in out

    def test_decimal_input(self, capsys):
        _, out = run(capsys, "classify", "--p", "2", "--N", "-0.6", "--D", "-0.3", "--json")
        data = json.loads(out)
        assert data["N"] == "-3/5" and data["sector"] == "I"

    def test_out_of_square(self, capsys):
        code = main(["classify", "--p", "2", "--N", "1", "--D", "0"])
        assert code == 1
        assert "InvalidParams" in capsys.readouterr().err

    def test_usage_error(self):
        with pytest.raises(SystemExit) as info:
            main(["classify", "--p", "2"])
        assert info.value.code == 1

    def test_float_text_rejected_cleanly(self):
        with pytest.raises(SystemExit) as info:
            main(["classify", "--p", "two", "--N", "0", "--D", "0"])
        assert info.value.code == 1


class TestKhyp:
    def test_positive_charge(self, capsys, tmp_path):
        path = write_charge(tmp_path, Charge.build([(1, F(1, 2)), (F(1, 2), F(1, 2))]))
        code, out = run(capsys, "khyp", "--charge", path, "--k", "3", "--m-range", "10")
        data = json.loads(out)
        assert code == 0 and data["overall"] != "NotPSD" and data["m_range"] == 10

    def test_mixed_charge(self, capsys, tmp_path):
        c = Charge.build([(1, F(6, 5)), (F(1, 2), F(-3, 10)), (F(1, 4), F(1, 10))])
        code, out = run(capsys, "khyp", "--charge", write_charge(tmp_path, c), "--k", "2", "--m-range", "30")
        data = json.loads(out)
        assert code == 2
        assert data["overall"] == "NotPSD"
        assert data["certificate"] == "eventually_fails"

    def test_constant(self, capsys, tmp_path):
        code, out = run(capsys, "khyp", "--charge", write_charge(tmp_path, Charge.point(1)), "--k", "2")
        assert code == 0 and json.loads(out)["overall"] == "PSD_singular"

    def test_grws(self, capsys):
        code, out = run(capsys, "khyp", "--p", "2", "--N", "1/2", "--D", "1/4", "--k", "1")
        assert code == 2

    def test_needs_source(self, capsys):
        assert main(["khyp", "--k", "1"]) == 1


class TestOtherCommands:
    def test_charge_special_line(self, capsys):
        code, out = run(capsys, "charge", "--p", "2", "--N", "-1/5", "--D", "-2/5")
        data = json.loads(out)
        assert len(data["atoms"]) == 2 and data["normalized"] and "tail" not in data

    def test_moments(self, capsys, tmp_path):
        path = write_charge(tmp_path, Charge.build([(1, F(3, 2)), (F(1, 2), F(-1, 2))]))
        _, out = run(capsys, "moments", "--charge", path, "--count", "3")
        assert json.loads(out)["moments"] == ["1/1", "5/4", "11/8"]

    def test_moments_grws(self, capsys):
        _, out = run(capsys, "moments", "--p", "2", "--N", "-1/2", "--D", "-3/4", "--count", "2")
        assert json.loads(out)["moments"] == ["1/1", "2/1"]

    def test_convolve(self, capsys, tmp_path):
        a = write_charge(tmp_path, Charge.build([(1, 1), (F(1, 2), -1)]), "a.json")
        b = write_charge(tmp_path, Charge.build([(1, 1), (F(1, 2), 1)]), "b.json")
        _, out = run(capsys, "convolve", a, b)
        assert Charge.from_dict(json.loads(out)) == Charge.build([(1, 1), (F(1, 4), -1)])

    def test_cpd_mult(self, capsys):
        code, out = run(capsys, "cpd-mult", "--p", "2", "--N", "-2/5", "--D", "-9/10", "--depth", "8")
        data = json.loads(out)
        assert code == 0 and data["multipliers"] == ["2/1"] and data["complete"] is False

    def test_cpd_mult_none(self, capsys, tmp_path):
        c = Charge.build([(1, 1), (F(1, 2), F(-3, 10)), (F(1, 4), F(-1, 5)), (F(1, 8), F(1, 2))])
        code, out = run(capsys, "cpd-mult", "--charge", write_charge(tmp_path, c))
        assert code == 2 and json.loads(out)["status"] == "NoMultiplier"

    def test_che_build_and_check(self, capsys, tmp_path):
        sigma = write_charge(tmp_path, Charge.point(F(1, 2), F(1, 2)), "s.json")
        _, out = run(capsys, "che-build", "--sigma", sigma)
        built = tmp_path / "ch.json"
        built.write_text(out)
        code, out = run(capsys, "che-check", "--charge", str(built))
        data = json.loads(out)
        assert code == 0
        assert data["levy_khinchin"]["a"] == "1/1"
        assert data["completely_alternating"]["passed"] is True

    def test_che_check_wrong_shape(self, capsys, tmp_path):
        path = write_charge(tmp_path, Charge.build([(1, 2), (F(1, 2), -1), (2, F(-1, 10))]))
        code, _ = run(capsys, "che-check", "--charge", path)
        assert code == 2

    def test_asymp_sign(self, capsys, tmp_path):
        c = Charge.build([(1, F(6, 5)), (F(1, 2), F(-3, 10)), (F(1, 4), F(1, 10))])
        _, out = run(capsys, "asymp-sign", "--charge", write_charge(tmp_path, c), "--k", "2")
        data = json.loads(out)
        assert data["sign"] == "-" and int(data["dominance"]["n_star"]) >= 0

    def test_stdin_charge(self, capsys, monkeypatch):
        monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(Charge.point(1).to_dict())))
        _, out = run(capsys, "moments", "--charge", "-", "--count", "2")
        assert json.loads(out)["moments"] == ["1/1", "1/1"]

    def test_missing_file(self, capsys):
        assert main(["moments", "--charge", "/nonexistent.json"]) == 1


class TestDeterminism:
    def test_bytes_identical(self, capsys, tmp_path):
        argv = ["charge", "--p", "3/2", "--N", "-1/3", "--D", "-1/2", "--depth", "6"]
        first = run(capsys, *argv)[1]
        second = run(capsys, *argv)[1]
        assert first == second
        assert list(json.loads(first)) == sorted(json.loads(first))

    def test_console_script(self):
        out = subprocess.run(
            [sys.executable, "-m", "shiftcharge.cli", "classify", "--p", "2", "--N", "-2/5", "--D", "-9/10"],
            capture_output=True, text=True, check=True,
        ).stdout
        assert "VIIIB" in out


class TestSweep:
    def rows(self, capsys, *argv):
        code, out = run(capsys, "sweep", *argv)
        assert code == 0
        return list(csv.DictReader(io.StringIO(out)))

    def test_sector_three_grid(self, capsys):
        rows = self.rows(capsys, "--p", "2", "--N", "-3/10:-1/10:3", "--D", "1/2:9/10:3")
        assert len(rows) == 9
        assert {r["sector"] for r in rows} == {"III"}
        assert all(set(r["sign_pattern"]) == {"+"} for r in rows)

    def test_row_order(self, capsys):
        rows = self.rows(capsys, "--p", "2", "--N", "-3/10:-1/10:2", "--D", "1/2:9/10:2")
        assert [(r["N"], r["D"]) for r in rows] == [
            ("-3/10", "1/2"), ("-3/10", "9/10"), ("-1/10", "1/2"), ("-1/10", "9/10"),
        ]

    def test_single_point_matches_classify(self, capsys):
        rows = self.rows(capsys, "--p", "2", "--N", "1/4:1/4:1", "--D", "1/2:1/2:1")
        _, out = run(capsys, "classify", "--p", "2", "--N", "1/4", "--D", "1/2", "--json")
        data = json.loads(out)
        assert rows[0]["sector"] == data["sector"]
        assert rows[0]["special_line_j"] == str(data["special_line_j"])

    def test_viiib_strip(self, capsys):
        # third quadrant between D = 4N and D = 2N, off both lines
        rows = self.rows(capsys, "--p", "2", "--N", "-1/5:-1/5:1", "--D", "-3/4:-9/20:4")
        assert {r["sector"] for r in rows} == {"VIIIB"}
        assert all(r["cpd_multipliers"] == "2/1" for r in rows)

    def test_columns_and_out_file(self, capsys, tmp_path):
        target = tmp_path / "grid.csv"
        run(capsys, "sweep", "--p", "3", "--N", "1/4:1/4:1", "--D", "1/2:1/2:1", "--out", str(target))
        header = target.read_text().splitlines()[0]
        assert tuple(header.split(",")) == CSV_COLUMNS

    def test_parallel_matches_serial(self):
        spec = SweepSpec(F(2), (F(-1, 2), F(1, 2), 3), (F(-1, 2), F(1, 2), 3), depth=8, khyp_max=1, horizon=4)
        serial = sweep_rows(spec, workers=1)
        parallel = sweep_rows(spec, workers=3)
        assert serial == parallel
        buf1, buf2 = io.StringIO(), io.StringIO()
        write_csv(serial, buf1)
        write_csv(parallel, buf2)
        assert buf1.getvalue() == buf2.getvalue()

    def test_threads_env(self, monkeypatch):
        from shiftcharge.sweep import thread_count

        monkeypatch.setenv("SHIFTCHARGE_THREADS", "3")
        assert thread_count() == 3
        monkeypatch.setenv("SHIFTCHARGE_THREADS", "junk")
        assert thread_count() == 1

    def test_spec_validation(self):
        from shiftcharge.errors import InvalidParams

        with pytest.raises(InvalidParams):
            SweepSpec(F(2), (F(-1), F(0), 2), (F(0), F(1, 2), 2))
        with pytest.raises(InvalidParams):
            SweepSpec(F(2), (F(0), F(0), 0), (F(0), F(1, 2), 2))

    def test_grid_points_classify(self):
        spec = SweepSpec(F(2), (F(-1, 2), F(-1, 4), 2), (F(1, 4), F(1, 2), 2))
        for point in spec.grid():
            assert isinstance(point, GrwsParams)
            classify_sector(point)
