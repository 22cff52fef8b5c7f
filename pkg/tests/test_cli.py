import csv
import io
import subprocess
import sys
from pathlib import Path

import pytest
from scipy import stats

from fusionnet.cli import SweepSpec, UsageError, main, parse_cost

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_net(tmp_path, text, name="net.net"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestParsing:
    def test_sweep_linear(self):
        s = SweepSpec.parse("sigma_x:0.5:2:4")
        assert s.var == "sigma_x"
        assert list(s.values()) == pytest.approx([0.5, 1.0, 1.5, 2.0])

    def test_sweep_log(self):
        assert list(SweepSpec.parse("tau:0.25:4:5:log").values()) == pytest.approx([0.25, 0.5, 1.0, 2.0, 4.0])

    @pytest.mark.parametrize("text", ["x:1:2", "x:a:2:3", "x:1:2:0", "x:2:1:3", "x:1:1:2", "x:0:2:3:log",
                                      "x:1:2:3:cubic"])
    def test_sweep_invalid(self, text):
        with pytest.raises(UsageError):
            SweepSpec.parse(text)

    def test_sweep_single_point(self):
        assert SweepSpec.parse("x:1.5:1.5:1").values() == [1.5]

    def test_cost(self):
        assert parse_cost("0,1,1,0").as_array().tolist() == [[0, 1], [1, 0]]
        with pytest.raises(ValueError):
            parse_cost("0,1,1")


class TestThresholdCount:
    @pytest.mark.parametrize("name,count", [("acyclic11.net", 36), ("tree11.net", 26), ("tandem.net", 3),
                                            ("single.net", 1)])
    def test_counts(self, capsys, name, count):
        code, out, _ = run(capsys, "threshold-count", DATA / name)
        assert code == 0
        assert out.strip() == str(count)

    def test_entry_point(self):
        out = subprocess.run([sys.executable, "-m", "fusionnet.cli", "threshold-count", str(DATA / "acyclic11.net")],
                             capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "36"


class TestOptimize:
    def test_single_sensor_error_probability(self, capsys):
        code, out, _ = run(capsys, "optimize", DATA / "single.net", "--objective", "pe")
        assert code == 0
        value = float(next(line for line in out.splitlines() if line.startswith("value:")).split()[1])
        assert value == pytest.approx(stats.norm.sf(0.5), abs=1e-11)

    def test_csv_table(self, capsys, tmp_path):
        target = tmp_path / "rules.csv"
        code, _, _ = run(capsys, "optimize", DATA / "tandem.net", "--out", target, "--dat", "--verify")
        assert code == 0
        rows = list(csv.reader(io.StringIO(target.read_text())))
        assert rows[0] == ["node", "message", "threshold", "P0", "P1"]
        assert [r[:2] for r in rows[1:]] == [["1", "0"], ["1", "1"], ["2", "-"]]
        dat = target.with_suffix(".dat").read_text().splitlines()
        assert len(dat) == len(rows)

    def test_np_and_kl(self, capsys):
        code, out, _ = run(capsys, "optimize", DATA / "tandem.net", "--objective", "np", "--alpha", "0.2")
        assert code == 0 and "P_d:" in out
        code, out, _ = run(capsys, "optimize", DATA / "tandem.net", "--objective", "kl")
        assert code == 0 and "threshold residual:" in out

    def test_correlated(self, capsys):
        code, out, _ = run(capsys, "optimize", DATA / "corr.net", "--objective", "pe", "--restarts", "1")
        assert code == 0
        assert sum(line.startswith(("t_", "T0_", "T1_")) for line in out.splitlines()) == 6


class TestExitCodes:
    def test_parse_error_reports_line(self, capsys, tmp_path):
        p = write_net(tmp_path, "n 2\nedge 2 1\nedge 1 2\n")
        code, _, err = run(capsys, "threshold-count", p)
        assert code == 2
        assert "line" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "threshold-count", tmp_path / "absent.net")
        assert code == 2

    def test_missing_alpha(self, capsys):
        code, _, _ = run(capsys, "optimize", DATA / "tandem.net", "--objective", "np")
        assert code == 2

    def test_strict_non_convergence(self, capsys):
        code, out, _ = run(capsys, "optimize", DATA / "tandem.net", "--max-iter", "1", "--strict")
        assert code == 3
        assert "converged: no" in out

    def test_verify_failure(self, capsys):
        # one sensor cannot beat two, so claiming it does must fail verification
        code, _, _ = run(capsys, "compare-patterns", DATA / "single.net", DATA / "tandem.net",
                         "--sweep", "sigma_1:1:1:1", "--verify")
        assert code == 4

    def test_bad_jobs(self, capsys):
        code, _, _ = run(capsys, "kl-curve", "--jobs", "0")
        assert code == 2


class TestSweeps:
    def test_deterministic_output(self, capsys):
        argv = ("kl-curve", "--sweep", "sigma_x:0.5:2:3:log")
        first = run(capsys, *argv)[1]
        second = run(capsys, *argv)[1]
        assert first == second
        assert first.splitlines()[0] == "sigma_x,K_YX,K_XYX,K_XY,K_YXY,converged"

    def test_jobs_keep_order(self, capsys):
        argv = ("kl-curve", "--sweep", "sigma_x:0.5:2:3:log", "--verify")
        code1, serial, _ = run(capsys, *argv)
        code2, parallel, _ = run(capsys, *argv, "--jobs", "2")
        assert code1 == code2 == 0
        assert serial == parallel

    def test_verbose_either_side(self, capsys):
        code, _, _ = run(capsys, "-v", "threshold-count", DATA / "tandem.net")
        assert code == 0
        code, _, _ = run(capsys, "threshold-count", DATA / "tandem.net", "-v")
        assert code == 0

    def test_family_search(self, capsys):
        code, out, _ = run(capsys, "compare-patterns", "--family", "3,2", "--sweep", "sigma_1:1:1:1")
        assert code == 0
        assert out.splitlines()[1].split(",")[1] == "2->1 3->1"
