"""Runtime force-to-configuration map along a planned manifold.

The measured horizontal hand force picks a position on the manifold
through the linear map s = f / f_max, clamped to [0, 1]; the emitted
joint target is q(s). Raw force sensing is noisy and a straight map can
shake the robot, so the controller low-passes the measurement and limits
the slew rate of s. Both behaviors are configurable and can be disabled
to get the bare linear map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import ManifoldSpec, eval_config


class ControllerError(ValueError):
    """Invalid controller configuration."""


def force_to_s(f_h1: float, f_max: float) -> float:
    """Linear force-to-position map, clamped to the manifold domain."""
    if not f_max > 0.0:
        raise ControllerError(f"f_max must be positive, got {f_max}")
    return float(min(max(f_h1 / f_max, 0.0), 1.0))


@dataclass
class ControllerState:
    """Single-writer state machine emitting manifold targets at a fixed rate.

    force_filter_cutoff is the first-order low-pass cutoff in Hz (None
    disables filtering); s_slew_limit bounds |ds/dt| in 1/s (None disables
    the limit). A non-finite measurement holds the previous state and
    raises the fault flag instead of propagating garbage downstream.
    """

    manifold: ManifoldSpec
    rate: float = 20.0
    force_filter_cutoff: float | None = 5.0
    s_slew_limit: float | None = 1.0
    filtered_force: float = 0.0
    s_current: float = 0.0
    fault: bool = False

    def __post_init__(self) -> None:
        if not self.rate > 0.0:
            raise ControllerError(f"rate must be positive, got {self.rate}")
        if not self.manifold.f_max > 0.0:
            raise ControllerError("manifold was planned without a positive f_max")
        if self.force_filter_cutoff is not None and self.force_filter_cutoff <= 0.0:
            raise ControllerError("force_filter_cutoff must be positive or None")
        if self.s_slew_limit is not None and self.s_slew_limit <= 0.0:
            raise ControllerError("s_slew_limit must be positive or None")

    @property
    def dt(self) -> float:
        return 1.0 / self.rate

    def reset(self) -> None:
        self.filtered_force = 0.0
        self.s_current = 0.0
        self.fault = False

    def target(self) -> np.ndarray:
        return eval_config(self.manifold, self.s_current)

    def step(self, measured_force: float, dt: float | None = None) -> np.ndarray:
        """Advance one control tick and return the joint target q(s)."""
        dt = self.dt if dt is None else float(dt)
        if not dt > 0.0:
            raise ControllerError(f"dt must be positive, got {dt}")
        if not math.isfinite(measured_force):
            self.fault = True
        else:
            self.fault = False
            if self.force_filter_cutoff is None:
                self.filtered_force = float(measured_force)
            else:
                alpha = 1.0 - math.exp(-2.0 * math.pi * self.force_filter_cutoff * dt)
                self.filtered_force += alpha * (float(measured_force) - self.filtered_force)
        s_target = force_to_s(self.filtered_force, self.manifold.f_max)
        if self.s_slew_limit is None:
            self.s_current = s_target
        else:
            step = self.s_slew_limit * dt
            self.s_current += float(np.clip(s_target - self.s_current, -step, step))
        self.s_current = float(min(max(self.s_current, 0.0), 1.0))
        return self.target()
