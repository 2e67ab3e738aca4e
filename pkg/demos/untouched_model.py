"""
No secret channels, one quiet server
====================================

Without secret channels the user needs another way to get the hash points.
Here the adversary watches ``E`` servers and corrupts ``B``, and at least one
server is neither watched nor corrupted.  The servers broadcast the points
and message hashes over a secure broadcast, and the user checks whole
messages instead of rows.
"""

from byzspir import SchemeParams, accounting
from byzspir.sim import ExperimentConfig, run_experiment, run_trial, trial_seed

params = SchemeParams.create(K=2, N=4, T=1, B=1, E=2, l=64, alpha=4, beta=2,
                             model="untouched")

###############################################################################
# One trial, traced.

t = run_trial(params, 1, "additive", trial_seed(0, 0))
print("observed", t.observed, "corrupted", t.corrupted)
for ev in t.events:
    print(" ", ev.as_dict())
print("outcome:", t.classification.value)

###############################################################################
# The broadcast is expensive per bit but its cost does not grow with l, so
# the rate still tends to 1 - (T+B)/N.

for l in (64, 10**3, 10**4, 10**6):
    p = SchemeParams.create(K=2, N=4, T=1, B=1, E=2, l=l, alpha=4, beta=2,
                            model="untouched")
    print(f"l={l:<8} rate={float(accounting(p).rate):.4f}")

###############################################################################
# A short experiment.

r = run_experiment(ExperimentConfig(model="untouched", n=4, e=2, l=64, alpha=4, beta=2,
                                    strategy="hashguess", trials=500, seed=3))
print(r.errors, "errors; bound", f"{r.analytic_bound:.2e}")
