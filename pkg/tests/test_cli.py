import math
import subprocess
import sys

import numpy as np
import pytest

from spdgeom.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def value(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return float(out.strip())


class TestEval:
    def test_metric_examples(self, capsys):
        assert value(capsys, "eval", "metric", "euclidean", "--sigma", "1,1", "--x", "1,1") == 2.0
        bkm = value(capsys, "eval", "metric", "bkm", "--sigma", "1,2", "--x", "1,0;0,0")
        assert bkm == pytest.approx(1.0)
        me = value(capsys, "eval", "metric", "--me", "id,log", "--sigma", "1,2", "--x", "1,0;0,0")
        assert me == pytest.approx(bkm)
        # 1x1 power-Euclidean with p = 1/2: (sigma^(p-1) x)^2 = 1/4 at sigma = 4
        assert value(capsys, "eval", "metric", "power-euclidean:0.5", "--sigma", "4", "--x", "1") == pytest.approx(0.25)

    def test_output_has_15_digits(self, capsys):
        code, out, _ = run(capsys, "eval", "distance", "--mpe", "1,1", "--sigma", "1,4", "--sigma2", "4,1")
        assert code == 0
        assert out.strip() == "%.15g" % math.sqrt(18)

    def test_divergence_examples(self, capsys):
        assert value(capsys, "eval", "divergence", "--alpha", "1", "--beta", "1", "--sigma", "1", "--sigma2", "3") == 2.0
        d = value(capsys, "eval", "divergence", "--alpha", "1", "--beta", "-1", "--sigma", "2", "--sigma2", "1")
        assert d == pytest.approx(1 - math.log(2), abs=1e-14)
        dual = value(capsys, "eval", "divergence", "--alpha", "1", "--beta", "0", "--dual", "--sigma", "2", "--sigma2", "1")
        assert dual == pytest.approx(
            value(capsys, "eval", "divergence", "--alpha", "0", "--beta", "1", "--sigma", "2", "--sigma2", "1")
        )
        uv = value(capsys, "eval", "divergence", "--uv", "id,id", "--sigma", "1", "--sigma2", "3")
        assert uv == pytest.approx(2.0)

    def test_distance_examples(self, capsys):
        assert value(capsys, "eval", "distance", "--mpe", "1,1", "--sigma", "1,4", "--sigma2", "4,1") == pytest.approx(
            math.sqrt(18), abs=1e-14
        )
        assert value(capsys, "eval", "distance", "--mpe", "0.5,0.5", "--sigma", "1", "--sigma2", "4") == pytest.approx(2.0, abs=1e-12)
        le = value(capsys, "eval", "distance", "log-euclidean", "--sigma", "1", "--sigma2", "4")
        assert le == pytest.approx(math.log(4), abs=1e-14)

    def test_curvature(self, capsys):
        k = value(capsys, "eval", "curvature", "--mpe", "1,-1", "--sigma", "1,1", "--x", "1,0;0,-1", "--y", "0,1;1,0")
        assert k < 0
        flat = value(capsys, "eval", "curvature", "--mpe", "2,2", "--sigma", "1,3", "--x", "1,0;0,-1", "--y", "0,1;1,0")
        assert abs(flat) <= 1e-12
        r = value(
            capsys, "eval", "curvature", "--me", "exp,log", "--sigma", "1,2",
            "--x", "1,0;0,0", "--y", "0,1;1,0", "--z", "1,0;0,0", "--t", "0,1;1,0",
        )
        assert math.isfinite(r)

    def test_csv_matrix_input(self, capsys, tmp_path):
        path = tmp_path / "sigma.csv"
        np.savetxt(path, np.eye(2), delimiter=",")
        assert value(capsys, "eval", "metric", "euclidean", "--sigma", str(path), "--x", str(path)) == 2.0


class TestErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["eval", "metric", "no-such-metric", "--sigma", "1", "--x", "1"],
            ["eval", "metric", "euclidean", "--sigma", "1,x", "--x", "1"],
            ["eval", "divergence", "--sigma", "1", "--sigma2", "2"],
            ["eval", "divergence", "--uv", "log", "--sigma", "1", "--sigma2", "2"],
            ["eval", "metric", "--me", "id,sin", "--sigma", "1", "--x", "1"],
            ["curvature-grid", "--alpha", "0:1:0.5", "--beta", "0:1:0.25"],
        ],
    )
    def test_parse_errors_exit_2(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 2 and out == "" and "error" in err

    @pytest.mark.parametrize(
        "argv",
        [
            ["eval", "metric", "euclidean", "--sigma", "1,-1", "--x", "1,1"],
            ["eval", "distance", "--mpe", "1,-1", "--sigma", "1", "--sigma2", "2"],
            ["eval", "distance", "--mpe", "1,1", "--sigma", "2,1;1,2", "--sigma2", "1,2"],
            ["eval", "divergence", "--alpha", "1", "--beta", "1", "--sigma", "1,2", "--sigma2", "1"],
        ],
    )
    def test_domain_errors_exit_3(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 3 and out == "" and err


class TestExperiments:
    def test_grid_to_file(self, capsys, tmp_path):
        out = tmp_path / "grid.csv"
        code, _, _ = run(
            capsys, "curvature-grid", "--alpha", "0:1:0.5", "--beta", "0:1:0.5",
            "--matrices", "5", "--planes", "5", "--out", str(out),
        )
        assert code == 0
        lines = out.read_bytes().decode("utf-8").split("\n")
        assert lines[0] == "alpha,beta,kappa_min,kappa_max,n_skipped"
        assert len(lines) == 1 + 9 + 1 and lines[-1] == ""

    def test_grid_to_stdout_is_deterministic(self, capsys):
        argv = ["curvature-grid", "--alpha", "-1:1:1", "--beta", "-1:1:1", "--matrices", "5", "--planes", "5", "--seed", "3"]
        _, a, _ = run(capsys, *argv)
        _, b, _ = run(capsys, *argv)
        assert a == b and a.count("\n") == 10

    def test_negative_ranges_as_separate_arguments(self, capsys):
        argv = ["curvature-grid", "--alpha", "-0.5:0:0.5", "--beta", "-0.5:0:0.5", "--matrices", "2", "--planes", "2"]
        code, out, _ = run(capsys, *argv)
        assert code == 0
        assert out.splitlines()[1].startswith("-0.5,-0.5,")

    def test_scan(self, capsys, tmp_path):
        out = tmp_path / "scan.csv"
        code, stdout, _ = run(capsys, "mean-kernel-scan", "--range", "2.5:2.7:0.1", "--out", str(out))
        assert code == 0
        lo, hi = map(float, stdout.strip().split("(")[1].rstrip(")").split(","))
        assert 2.61 < lo < hi < 2.611
        assert out.read_text().startswith("p,is_mean,worst_axiom,worst_violation\n")


def test_console_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "spdgeom.cli", "eval", "metric", "euclidean", "--sigma", "1,1", "--x", "1,1"],
        capture_output=True, text=True, check=True,
    )
    assert res.stdout.strip() == "2"
