"""Experiment orchestration: force-grid sweeps and smoothness comparisons.

A sweep runs one episode per (mode, peak force M, rise time h) cell and
aggregates verdicts into per-mode success matrices, a flat CSV and an SVG
grid of green (success) and gray (failure) cells. The smoothness
comparison evaluates the planned manifold on the force grid next to
independent per-force solves and reports the worst adjacent joint jump of
each, which is the quantitative version of "the functional representation
removes the discontinuities".
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import ManifoldSpec, eval_config
from .model import RobotModel
from .planner import PlannerProblem, solve_per_force_baseline
from .simulator import EpisodeResult, ForceProfile, SimSettings, run_episode


class HarnessError(ValueError):
    """Invalid sweep configuration."""


@dataclass(frozen=True)
class SweepConfig:
    """Grid of force profiles to evaluate, per manifold mode."""

    M_values: tuple = (100.0, 125.0, 150.0, 175.0, 200.0)
    h_values: tuple = (1.0, 2.0, 3.0, 4.0)
    modes: tuple = ("robust", "standard")
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.M_values) == 0 or len(self.h_values) == 0 or len(self.modes) == 0:
            raise HarnessError("sweep needs at least one M, one h and one mode")
        if any(m < 0 for m in self.M_values):
            raise HarnessError("peak forces must be nonnegative")
        if any(h <= 0 for h in self.h_values):
            raise HarnessError("rise times must be positive")


@dataclass
class SweepCell:
    mode: str
    M: float
    h: float
    success: bool
    failure_reason: str | None
    max_abs_zmp: float
    margin_exceeded: bool


@dataclass
class SweepResult:
    config: SweepConfig
    cells: list[SweepCell]

    def success_matrix(self, mode: str) -> np.ndarray:
        """Boolean (len(h_values), len(M_values)) grid for one mode."""
        mi = {m: j for j, m in enumerate(self.config.M_values)}
        hi = {h: i for i, h in enumerate(self.config.h_values)}
        out = np.zeros((len(self.config.h_values), len(self.config.M_values)), dtype=bool)
        for cell in self.cells:
            if cell.mode == mode:
                out[hi[cell.h], mi[cell.M]] = cell.success
        return out

    def success_count(self, mode: str) -> int:
        return sum(1 for c in self.cells if c.mode == mode and c.success)

    def to_csv(self) -> str:
        lines = ["mode,M,h,success,failure_reason,max_abs_zmp"]
        for c in self.cells:
            reason = c.failure_reason if c.failure_reason else ""
            lines.append(
                f"{c.mode},{c.M:.9g},{c.h:.9g},{int(c.success)},{reason},{c.max_abs_zmp:.9g}"
            )
        return "\n".join(lines) + "\n"

    def save_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())


def _run_cell(args) -> SweepCell:
    model_dict, manifold_dict, settings, mode, M, h = args
    model = RobotModel.from_dict(model_dict)
    manifold = ManifoldSpec.from_dict(manifold_dict)
    profile = ForceProfile(kind="sinusoid", M=M, h=h)
    result = run_episode(model, manifold, profile, settings=settings)
    return SweepCell(
        mode=mode,
        M=M,
        h=h,
        success=result.success,
        failure_reason=result.failure_reason,
        max_abs_zmp=result.max_abs_zmp,
        margin_exceeded=result.margin_exceeded,
    )


def run_sweep(
    model: RobotModel,
    manifolds: dict[str, ManifoldSpec],
    config: SweepConfig | None = None,
    settings: SimSettings | None = None,
    workers: int = 1,
) -> SweepResult:
    """Run every (mode, M, h) episode; cells are independent and ordered.

    Results are assembled in grid order regardless of worker scheduling,
    so repeated runs produce identical CSV bytes.
    """
    config = config if config is not None else SweepConfig()
    settings = settings if settings is not None else SimSettings()
    missing = [m for m in config.modes if m not in manifolds]
    if missing:
        raise HarnessError(f"no manifold supplied for modes: {missing}")
    jobs = [
        (model.to_dict(), manifolds[mode].to_dict(), settings, mode, float(M), float(h))
        for mode in config.modes
        for h in config.h_values
        for M in config.M_values
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell, jobs))
    else:
        cells = [_run_cell(j) for j in jobs]
    return SweepResult(config=config, cells=cells)


_GREEN = "#2ca02c"
_GRAY = "#7f7f7f"


def render_success_grid(result: SweepResult, cell: int = 48) -> str:
    """Self-contained SVG: one success/failure panel per mode.

    Columns are peak forces M (N), rows are rise times h (s); green cells
    succeeded, gray failed.
    """
    cfg = result.config
    n_cols = len(cfg.M_values)
    n_rows = len(cfg.h_values)
    label_w, label_h, title_h, gap = 42, 28, 24, 30
    panel_w = label_w + n_cols * cell
    panel_h = title_h + label_h + n_rows * cell + 18
    width = len(cfg.modes) * panel_w + (len(cfg.modes) - 1) * gap
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{panel_h}" '
        f'font-family="sans-serif" font-size="13">'
    ]
    for p, mode in enumerate(cfg.modes):
        ox = p * (panel_w + gap)
        matrix = result.success_matrix(mode)
        parts.append(
            f'<text x="{ox + label_w + n_cols * cell / 2}" y="16" '
            f'text-anchor="middle" font-weight="bold">{mode}</text>'
        )
        for j, M in enumerate(cfg.M_values):
            parts.append(
                f'<text x="{ox + label_w + j * cell + cell / 2}" y="{title_h + 14}" '
                f'text-anchor="middle">{M:g}</text>'
            )
        for i, h in enumerate(cfg.h_values):
            parts.append(
                f'<text x="{ox + label_w - 8}" y="{title_h + label_h + i * cell + cell / 2 + 5}" '
                f'text-anchor="end">{h:g}</text>'
            )
            for j in range(n_cols):
                color = _GREEN if matrix[i, j] else _GRAY
                parts.append(
                    f'<rect x="{ox + label_w + j * cell}" y="{title_h + label_h + i * cell}" '
                    f'width="{cell - 2}" height="{cell - 2}" fill="{color}"/>'
                )
        parts.append(
            f'<text x="{ox + label_w + n_cols * cell / 2}" '
            f'y="{title_h + label_h + n_rows * cell + 14}" text-anchor="middle">'
            f"M [N] across, h [s] down</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


@dataclass
class SmoothnessComparison:
    """Manifold vs per-force traces on a shared force grid."""

    forces: np.ndarray
    manifold_configs: np.ndarray
    baseline_configs: np.ndarray
    manifold_max_jump: float
    baseline_max_jump: float
    baseline_feasible: np.ndarray

    def to_csv(self) -> str:
        d = self.manifold_configs.shape[1]
        header = ["force", "method"] + [f"q{i}" for i in range(d)]
        lines = [",".join(header)]
        for name, configs in (
            ("manifold", self.manifold_configs),
            ("per_force", self.baseline_configs),
        ):
            for f, q in zip(self.forces, configs):
                lines.append(
                    ",".join([f"{f:.9g}", name] + [f"{v:.9g}" for v in q])
                )
        return "\n".join(lines) + "\n"

    def save_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())


def compare_smoothness(
    problem: PlannerProblem, manifold: ManifoldSpec, force_grid=None
) -> SmoothnessComparison:
    """Adjacent-jump comparison between the manifold and per-force solves."""
    if force_grid is None:
        forces = problem.s_grid * problem.f_max
    else:
        forces = np.asarray(force_grid, dtype=float)
    if problem.f_max > 0:
        s_values = np.clip(forces / problem.f_max, 0.0, 1.0)
    else:
        s_values = np.zeros_like(forces)
    manifold_configs = np.stack([eval_config(manifold, float(s)) for s in s_values])
    baseline = solve_per_force_baseline(problem, forces)
    man_jump = (
        float(np.max(np.abs(np.diff(manifold_configs, axis=0))))
        if len(forces) > 1
        else 0.0
    )
    return SmoothnessComparison(
        forces=forces,
        manifold_configs=manifold_configs,
        baseline_configs=baseline.configs,
        manifold_max_jump=man_jump,
        baseline_max_jump=baseline.max_adjacent_jump(),
        baseline_feasible=baseline.feasible,
    )
