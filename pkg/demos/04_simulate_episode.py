"""Run one simulated assistance episode against a planned manifold.

The human is a sinusoidal pull that rises to its peak in h seconds and
returns to zero by 2h. The robot tracks the manifold with the linear
force-to-position controller at 20 Hz while the dynamics integrate at
1 kHz; the episode fails the moment the dynamic balance point leaves the
true support interval.
"""

import numpy as np

from stancepath import default_model
from stancepath.planner import PlannerProblem, solve_manifold
from stancepath.simulator import ForceProfile, run_episode

model = default_model()
problem = PlannerProblem(model=model)
manifold, report = solve_manifold(problem, "robust")
assert report.converged

profile = ForceProfile(kind="sinusoid", M=175.0, h=2.0)
result = run_episode(model, manifold, profile)

print(f"episode: success={result.success}  failure={result.failure_reason}")
print(f"peak |balance point| {result.max_abs_zmp:.3f} m "
      f"(support half-width {model.foot_extent[1]:.2f} m)")
print(f"planning margin exceeded at some instant: {result.margin_exceeded} "
      "(reported, not a failure)")

print("\ntick snapshots (every second):")
print(f"{'t [s]':>6} {'pull [N]':>9} {'s':>6} {'zmp [m]':>8}  pose")
step = int(round(1.0 / (result.t[1] - result.t[0])))
for i in range(0, len(result.t), step):
    print(f"{result.t[i]:6.2f} {result.f_h1[i]:9.1f} {result.s[i]:6.3f} "
          f"{result.zmp[i]:+8.4f}  {np.round(result.q[i], 2)}")

result.save_csv("/tmp/stancepath_episode.csv")
print("\nfull 20 Hz time series written to /tmp/stancepath_episode.csv")
