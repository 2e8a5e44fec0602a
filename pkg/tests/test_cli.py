import json

import numpy as np
import pytest

from rpca.cli import main
from rpca.matio import read_matrix, write_matrix
from rpca.solver import threshold_value
from rpca.synthetic import SyntheticSpec, generate


def run_synth(tmp_path, n=60, rank=2, alpha=0.1, c=1.0, seed=5, fmt="bin"):
    out = tmp_path / "synth"
    code = main(
        [
            "synth",
            "--n", str(n),
            "--rank", str(rank),
            "--alpha", str(alpha),
            "--c", str(c),
            "--seed", str(seed),
            "--format", fmt,
            "--output-dir", str(out),
        ]
    )
    assert code == 0
    return out


class TestSynthCommand:
    def test_writes_consistent_artifacts(self, tmp_path):
        out = run_synth(tmp_path)
        d = read_matrix(out / "D.bin")
        l = read_matrix(out / "L.bin")
        s = read_matrix(out / "S.bin")
        assert np.array_equal(d, l + s)
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["schema_version"] == 1
        assert meta["spec"]["n"] == 60 and meta["seed"] == 5
        assert meta["support_size"] == int(0.1 * 60 * 60)
        # files match a library regeneration with the same seed
        prob = generate(SyntheticSpec(60, 60, 2, 0.1, 1.0, 5))
        assert np.array_equal(d, prob.data)

    def test_invalid_spec_exits_one(self, tmp_path, capsys):
        code = main(
            ["synth", "--n", "10", "--rank", "20", "--alpha", "0.1", "--c", "1",
             "--seed", "0", "--output-dir", str(tmp_path)]
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestSolveCommand:
    def test_end_to_end_convergence(self, tmp_path):
        out = run_synth(tmp_path, n=200, rank=5, alpha=0.1, c=1.0, seed=9)
        code = main(
            ["solve", "--input", str(out / "D.bin"), "--rank", "5",
             "--gamma", "0.7", "--output-dir", str(out)]
        )
        assert code == 0
        trace = json.loads((out / "trace.json").read_text())
        assert trace["converged"] is True
        assert trace["trace"]["err"][-1] < 1e-6
        assert trace["schema_version"] == 1
        l = read_matrix(out / "L.bin")
        s = read_matrix(out / "S.bin")
        d = read_matrix(out / "D.bin")
        err = np.linalg.norm(d - l - s) / np.linalg.norm(d)
        assert err == pytest.approx(trace["final_err"], rel=1e-9)
        # zeta schedule is auditable from the recorded windows
        p = trace["params"]
        for k, zeta in enumerate(trace["trace"]["zeta"]):
            window = trace["trace"]["sigma_window"][k]
            if k == 0:
                assert zeta == pytest.approx(p["beta"] * window[0], rel=1e-12)
            else:
                expected = threshold_value(window, p["rank"], p["beta"], p["gamma"], k - 1)
                assert zeta == pytest.approx(expected, rel=1e-12)

    def test_mu_warning_when_omitted(self, tmp_path, capsys):
        out = run_synth(tmp_path, n=40, rank=2, seed=3)
        code = main(
            ["solve", "--input", str(out / "D.bin"), "--rank", "2",
             "--gamma", "0.7", "--output-dir", str(out)]
        )
        assert code == 0
        assert "--mu not given" in capsys.readouterr().err

    def test_altproj_and_no_trim(self, tmp_path):
        out = run_synth(tmp_path, n=60, rank=2, seed=4)
        for extra in (["--solver", "altproj"], ["--no-trim"]):
            code = main(
                ["solve", "--input", str(out / "D.bin"), "--rank", "2",
                 "--gamma", "0.7", "--output-dir", str(out)] + extra
            )
            assert code == 0

    def test_rank_out_of_range_exits_one(self, tmp_path, capsys):
        out = run_synth(tmp_path, n=20, rank=2, seed=6)
        code = main(["solve", "--input", str(out / "D.bin"), "--rank", "25"])
        assert code == 1
        assert "out of range" in capsys.readouterr().err

    def test_non_convergence_exits_two(self, tmp_path, capsys):
        out = run_synth(tmp_path, n=60, rank=2, alpha=0.2, seed=8)
        code = main(
            ["solve", "--input", str(out / "D.bin"), "--rank", "2",
             "--eps", "1e-15", "--max-iter", "2", "--output-dir", str(out)]
        )
        assert code == 2
        assert "did not converge" in capsys.readouterr().err
        trace = json.loads((out / "trace.json").read_text())
        assert trace["converged"] is False

    def test_missing_input_exits_one(self, tmp_path, capsys):
        code = main(["solve", "--input", str(tmp_path / "nope.bin"), "--rank", "2"])
        assert code == 1

    def test_csv_input_writes_csv_outputs(self, tmp_path):
        rng = np.random.default_rng(2)
        low = rng.standard_normal((30, 2)) @ rng.standard_normal((30, 2)).T
        path = tmp_path / "D.csv"
        write_matrix(low, path)
        code = main(["solve", "--input", str(path), "--rank", "2", "--output-dir", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "L.csv").exists() and (tmp_path / "S.csv").exists()


def write_grid(tmp_path, **overrides):
    grid = {
        "n": 40,
        "rank": 2,
        "alphas": [0.0, 0.1],
        "cs": [1.0],
        "trials": 2,
        "seed": 11,
        "gamma": 0.7,
    }
    grid.update(overrides)
    path = tmp_path / "grid.json"
    path.write_text(json.dumps(grid))
    return path


class TestPhaseCommand:
    def test_writes_report_and_csv(self, tmp_path):
        grid = write_grid(tmp_path)
        code = main(["phase", "--grid", str(grid), "--output-dir", str(tmp_path)])
        assert code == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["schema_version"] == 1
        assert len(report["records"]) == 12
        csv_lines = (tmp_path / "report.csv").read_text().strip().splitlines()
        assert len(csv_lines) == 13  # header + rows
        assert csv_lines[0].startswith("alpha,")

    def test_empty_grid_exits_one(self, tmp_path, capsys):
        grid = write_grid(tmp_path, alphas=[])
        assert main(["phase", "--grid", str(grid), "--output-dir", str(tmp_path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_key_exits_one(self, tmp_path, capsys):
        grid = write_grid(tmp_path, velocity=3)
        assert main(["phase", "--grid", str(grid), "--output-dir", str(tmp_path)]) == 1
        assert "unknown keys" in capsys.readouterr().err

    def test_missing_key_exits_one(self, tmp_path, capsys):
        path = tmp_path / "grid.json"
        path.write_text(json.dumps({"n": 20}))
        assert main(["phase", "--grid", str(path), "--output-dir", str(tmp_path)]) == 1
        assert "missing keys" in capsys.readouterr().err

    def test_grid_or_paper_required(self, tmp_path, capsys):
        assert main(["phase", "--output-dir", str(tmp_path)]) == 1
        assert "--grid" in capsys.readouterr().err


class TestBenchCommand:
    def test_writes_timings(self, tmp_path):
        code = main(
            ["bench", "--sizes", "48,64", "--rank", "2", "--output-dir", str(tmp_path)]
        )
        assert code == 0
        payload = json.loads((tmp_path / "timings.json").read_text())
        assert payload["kind"] == "runtime"
        assert len(payload["records"]) == 6  # 2 sizes x 3 solvers

    def test_bad_sizes_exit_one(self, tmp_path, capsys):
        assert main(["bench", "--sizes", "48,apple"]) == 1
        assert "--sizes" in capsys.readouterr().err


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        assert main(["explode"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_required_flag(self, capsys):
        assert main(["solve"]) == 1
        assert "error:" in capsys.readouterr().err
