"""Blocking counts by alignment regime, mechanism by mechanism.

Miniature of the headline experiment: every alignment regime, every
mechanism, a shared pool of generated markets per regime, mean and
sample standard deviation of each blocking category. Bump REPLICAS to
100 for the full-size version (a few minutes on one core).
"""

import time

from capmatch import ExperimentConfig, aggregate, run_experiment, table_text
from capmatch.generate import GenConfig

# ---- parameters --------------------------------------------------------
REPLICAS = 20
MASTER_SEED = 7
REGIMES = ("none", "student_full", "college_full", "student_and_college_full")

# ---- run ---------------------------------------------------------------
t0 = time.time()
rows = []
for regime in REGIMES:
    config = ExperimentConfig(
        market=GenConfig(alignment=regime),
        replicas=REPLICAS,
        master_seed=MASTER_SEED,
        name=f"alignment_{regime}",
    )
    rows.extend(aggregate(run_experiment(config)))

print(table_text(rows))
print(f"{len(REGIMES) * REPLICAS * 6} runs in {time.time() - t0:.1f}s")
