import numpy as np
import pytest

from rpca.experiments import (
    SOLVER_IDS,
    PhaseConfig,
    benchmark_l_updates,
    paper_phase_config,
    run_phase_experiment,
    run_runtime_experiment,
    trial_seed,
)


def small_config(**overrides):
    base = dict(
        alphas=(0.0, 0.1),
        amplitudes=(1.0,),
        trials=2,
        n=40,
        rank=2,
        master_seed=11,
        tol=1e-6,
        gamma=0.7,
    )
    base.update(overrides)
    return PhaseConfig(**base)


class TestTrialSeed:
    def test_deterministic(self):
        assert trial_seed(5, 1, 2) == trial_seed(5, 1, 2)

    def test_distinct_across_indices(self):
        seeds = {trial_seed(5, c, t) for c in range(8) for t in range(8)}
        assert len(seeds) == 64

    def test_distinct_across_masters(self):
        assert trial_seed(1, 0, 0) != trial_seed(2, 0, 0)


class TestPhaseConfig:
    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            small_config(alphas=())
        with pytest.raises(ValueError, match="at least one"):
            small_config(amplitudes=())

    def test_bad_trials_rejected(self):
        with pytest.raises(ValueError, match="trials"):
            small_config(trials=0)

    def test_unknown_solver_rejected(self):
        with pytest.raises(ValueError, match="unknown solver"):
            small_config(solvers=("accaltproj_trim", "gradient_descent"))

    def test_paper_config_shape(self):
        config = paper_phase_config()
        assert config.n == 2500 and config.rank == 5 and config.trials == 10
        assert config.alphas[0] == 0.3 and config.alphas[-1] == 0.75
        assert config.amplitudes == (0.2, 1.0, 5.0)
        assert config.gamma is None  # declared-alpha policy at full scale


class TestPhaseExperiment:
    def test_report_structure_and_clean_cells(self):
        report = run_phase_experiment(small_config())
        # 2 cells x 2 trials x 3 solvers
        assert len(report.records) == 12
        counts = report.success_counts()
        for solver in SOLVER_IDS:
            assert counts[(0.0, 1.0, solver)] == (2, 2)  # no corruption: always recovered
        for rec in report.records:
            assert rec.final_err >= 0.0
            assert len(rec.err_history) == len(rec.zeta_history)
            assert rec.iterations == len(rec.err_history) - 1

    def test_reproducible_across_runs(self):
        first = run_phase_experiment(small_config())
        second = run_phase_experiment(small_config())
        assert first.success_counts() == second.success_counts()
        for a, b in zip(first.records, second.records):
            assert a.solver == b.solver and a.seed == b.seed
            assert a.final_err == b.final_err
            assert a.err_history == b.err_history

    def test_monotonicity_summary_reflects_counts(self):
        report = run_phase_experiment(small_config())
        counts = report.success_counts()
        summary = report.monotone_in_alpha()
        for (solver, amplitude), flag in summary.items():
            wins = [
                counts[(alpha, amplitude, solver)][0]
                for alpha in sorted(a for a, c, s in counts if c == amplitude and s == solver)
            ]
            assert flag == all(y <= x for x, y in zip(wins, wins[1:]))

    def test_as_dict_is_json_ready(self):
        import json

        report = run_phase_experiment(small_config(trials=1))
        payload = report.as_dict()
        assert payload["schema_version"] == 1
        encoded = json.dumps(payload, allow_nan=False)
        assert "success_counts" in encoded


class TestRuntimeExperiment:
    def test_single_size_rows(self):
        report = run_runtime_experiment([80], rank=2, master_seed=3, gamma=0.7)
        assert len(report.records) == len(SOLVER_IDS)
        for rec in report.records:
            assert rec.n == 80 and rec.wall_seconds > 0.0
            assert rec.mean_l_update_seconds is None or rec.mean_l_update_seconds > 0.0

    def test_empty_sizes_rejected(self):
        with pytest.raises(ValueError, match="at least one size"):
            run_runtime_experiment([])


class TestBenchmark:
    def test_structure(self):
        out = benchmark_l_updates(100, 3, iters=3, seed=1)
        assert out["n"] == 100 and out["rank"] == 3 and out["iters"] == 3
        assert out["accelerated_mean_seconds"] > 0.0
        assert out["baseline_mean_seconds"] > 0.0
        assert out["accelerated_median_seconds"] > 0.0
        assert out["baseline_median_seconds"] > 0.0

    def test_quadratic_scaling_in_n(self):
        # Doubling n at fixed r should scale the accelerated update by about
        # 4x (it is dominated by two (n x n)(n x r) products); allow a
        # factor-2 band around that on measured medians.
        small = benchmark_l_updates(1000, 5, iters=20, seed=0)
        large = benchmark_l_updates(2000, 5, iters=20, seed=0)
        ratio = large["accelerated_median_seconds"] / small["accelerated_median_seconds"]
        assert 2.0 <= ratio <= 8.0, f"doubling n scaled the update by {ratio:.2f}x"
