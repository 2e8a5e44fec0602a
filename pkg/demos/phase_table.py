"""Success-rate table over corruption levels, at desk scale.

Reruns the published phase-transition protocol on small problems: for each
(alpha, c) cell, count how many of the seeded trials each solver recovers
exactly (relative error of the low-rank part within 1e-4).  The full-scale
grid (n = 2500, alpha up to 0.75) is available through
``rpca.paper_phase_config()`` or ``rpca phase --paper``; budget hours for it.
"""

from rpca import PhaseConfig, run_phase_experiment


def run_demo():
    config = PhaseConfig(
        alphas=(0.1, 0.2, 0.3, 0.4),
        amplitudes=(0.2, 1.0),
        trials=5,
        n=200,
        rank=5,
        master_seed=0,
        tol=1e-6,
        gamma=0.7,  # desk-scale decay rate; see PhaseConfig docs
    )
    print(f"n={config.n}, rank={config.rank}, {config.trials} trials per cell\n")
    report = run_phase_experiment(config)
    counts = report.success_counts()

    for amplitude in config.amplitudes:
        print(f"c = {amplitude}: successes out of {config.trials}")
        header = "  solver             " + "".join(f"  a={a:<5}" for a in config.alphas)
        print(header)
        for solver in config.solvers:
            row = "".join(
                f"  {counts[(alpha, amplitude, solver)][0]:<7}" for alpha in config.alphas
            )
            print(f"  {solver:<18}{row}")
        print()

    print("success counts non-increasing in alpha (this run):")
    for (solver, amplitude), flag in sorted(report.monotone_in_alpha().items()):
        print(f"  {solver:<18} c={amplitude}: {flag}")


if __name__ == "__main__":
    run_demo()
