"""Why a weighted curve instead of a lookup table of per-force solves.

Solving the terminal-configuration problem independently for each force
gives answers that jump between equally good solutions as the force
varies: the problem is redundant and nothing ties neighboring solves
together. The manifold optimizes all forces through one shared weight
vector, so neighboring positions cannot disagree.
"""

import numpy as np

from stancepath import default_model
from stancepath.harness import compare_smoothness
from stancepath.planner import PlannerProblem, solve_manifold

model = default_model()
problem = PlannerProblem(model=model)
manifold, report = solve_manifold(problem, "robust")
assert report.converged

comparison = compare_smoothness(problem, manifold)

print("worst change between adjacent grid forces (any joint, rad):")
print(f"  manifold:  {comparison.manifold_max_jump:.4f}")
print(f"  per-force: {comparison.baseline_max_jump:.4f}")

per_step = np.max(np.abs(np.diff(comparison.baseline_configs, axis=0)), axis=1)
print(f"\nper-force steps exceeding 0.05 rad: {int(np.sum(per_step > 0.05))} "
      f"of {len(per_step)}")

print("\nelbow angle against force, both methods:")
print(f"{'force [N]':>10} {'manifold':>10} {'per-force':>10}")
for f, qm, qb in zip(
    comparison.forces, comparison.manifold_configs, comparison.baseline_configs
):
    print(f"{f:10.1f} {qm[-1]:10.3f} {qb[-1]:10.3f}")

comparison.save_csv("/tmp/stancepath_smoothness.csv")
print("\nwrote /tmp/stancepath_smoothness.csv")
