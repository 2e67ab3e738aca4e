"""
How fast the error vanishes
===========================

The adversary in the secret channel model cannot see the hash points, so the
best it can do is guess them.  The chance of a good guess falls like
``(l/q)^alpha``, and with ``q`` about ``l^2`` that is ``(1/l)^alpha``.
"""

from byzspir.sim import ExperimentConfig, run_experiment

###############################################################################
# Run a small sweep against the hash-guessing adversary.

print(f"{'l':>4} {'q':>6} {'errors':>7} {'rate':>9} {'bound':>9}")
for l in (8, 16, 32, 64):
    r = run_experiment(ExperimentConfig(l=l, alpha=2, strategy="hashguess",
                                        trials=2000, seed=1))
    print(f"{l:>4} {r.q:>6} {r.errors:>7} {r.err_rate:>9.2e} {r.analytic_bound:>9.2e}")

###############################################################################
# A random overwrite slips past a single hash point about once in q tries.

r = run_experiment(ExperimentConfig(l=16, alpha=1, strategy="random", trials=2000, seed=2))
print("random overwrite, alpha=1:", r.errors, "errors in", r.trials)
