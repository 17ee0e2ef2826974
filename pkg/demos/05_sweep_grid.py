"""Sweep force peaks and rise times for both manifolds, like a score card.

Each grid cell is one episode: peak force M across, rise time h down.
The robust manifold tolerates most of the grid; the standard one, which
regulates its balance point to zero instead of banking slack against
surprises, tips over as soon as the pull outruns the static plan.
"""

from stancepath import default_model
from stancepath.harness import SweepConfig, render_success_grid, run_sweep
from stancepath.planner import PlannerProblem, solve_manifold

model = default_model()
problem = PlannerProblem(model=model)
manifolds = {
    mode: solve_manifold(problem, mode)[0] for mode in ("robust", "standard")
}

config = SweepConfig()  # M in {100..200} N, h in {1..4} s, both modes
result = run_sweep(model, manifolds, config)

for mode in config.modes:
    matrix = result.success_matrix(mode)
    print(f"\n{mode}: {result.success_count(mode)}/{matrix.size} episodes succeed")
    print("      " + "  ".join(f"{m:>5.0f}N" for m in config.M_values))
    for i, h in enumerate(config.h_values):
        row = "  ".join("  ok  " if ok else " FALL " for ok in matrix[i])
        print(f"h={h:3.0f}s {row}")

result.save_csv("/tmp/stancepath_sweep.csv")
with open("/tmp/stancepath_sweep.svg", "w") as fh:
    fh.write(render_success_grid(result))
print("\nwrote /tmp/stancepath_sweep.csv and /tmp/stancepath_sweep.svg")
