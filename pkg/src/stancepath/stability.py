"""Zero-moment-point statics and dynamics plus support membership tests.

Forces are those applied BY the human ON the robot, with anterior x
positive toward the human, so a pull comes in as positive f_h1. The
static balance point of the planar chain under a hand wrench is

    x_zmp = (f_h1 * x_h2 - f_h2 * x_h1 - m * g * x_com) / (-m * g - f_h2)

with g = -9.81, which for small vertical force and hand levers reduces to

    x_zmp ~= (f_h1 * x_h2 - m * g * x_com) / (-m * g).

The dynamic variant balances the rate of linear and angular momentum
about the ankle against gravity, the hand wrench and the ground contact,
and collapses to the static formula at zero velocity and acceleration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    GRAVITY,
    RobotModel,
    com_position,
    hand_position,
    link_com_kinematics,
)


class StabilityError(ValueError):
    """Degenerate force balance (lift or contact loss) or bad margins."""


#: Hard sanity cap on the horizontal hand force magnitude, ten times the
#: largest pull the planner is ever configured for.
FORCE_SANITY_BOUND = 2000.0

#: Below this vertical contact force (N) the robot is effectively airborne.
CONTACT_FORCE_MIN = 1.0


@dataclass(frozen=True)
class HandWrench:
    """Horizontal and vertical force applied by the human on the hands."""

    f_h1: float = 0.0  # N, anterior pull positive
    f_h2: float = 0.0  # N, upward positive

    def __post_init__(self) -> None:
        if not (math.isfinite(self.f_h1) and math.isfinite(self.f_h2)):
            raise StabilityError("hand wrench components must be finite")
        if abs(self.f_h1) > FORCE_SANITY_BOUND:
            raise StabilityError(
                f"|f_h1| = {abs(self.f_h1):.1f} N exceeds the sanity bound "
                f"{FORCE_SANITY_BOUND:.0f} N"
            )


@dataclass(frozen=True)
class ZmpResult:
    x_zmp: float
    inside_margin: bool
    inside_support: bool


def zmp_static_full(model: RobotModel, q, wrench: HandWrench) -> float:
    """Static balance point under the full hand wrench."""
    x_com, _ = com_position(model, q)
    x_h1, x_h2 = hand_position(model, q)
    m = model.total_mass
    denom = -m * GRAVITY - wrench.f_h2
    if abs(denom) < 1.0:
        raise StabilityError(
            "unsupported lift: vertical hand force cancels the robot weight"
        )
    return (wrench.f_h1 * x_h2 - wrench.f_h2 * x_h1 - m * GRAVITY * x_com) / denom


def zmp_static_simplified(model: RobotModel, q, f_h1: float) -> float:
    """Static balance point ignoring the vertical hand force."""
    x_com, _ = com_position(model, q)
    _, x_h2 = hand_position(model, q)
    m = model.total_mass
    return (f_h1 * x_h2 - m * GRAVITY * x_com) / (-m * GRAVITY)


def zmp_simplified_terms(model: RobotModel, q) -> tuple[float, float]:
    """(x_com, x_h2) so callers can sweep forces without re-running FK.

    zmp_static_simplified(model, q, f) == x_com + f * x_h2 / (-m * g).
    """
    x_com, _ = com_position(model, q)
    _, x_h2 = hand_position(model, q)
    return x_com, x_h2


def zmp_dynamic(model: RobotModel, q, qdot, qddot, wrench: HandWrench) -> float:
    """Balance point from the momentum-rate equations about the ankle.

    Uses link CoM accelerations obtained by differentiating the forward
    kinematics twice along (q, qdot, qddot) plus the rotational inertia
    terms; reduces to zmp_static_full when qdot = qddot = 0.
    """
    pts, _, acc, theta_dd = link_com_kinematics(model, q, qdot, qddot)
    masses = np.array([l.mass for l in model.links])
    inertias = np.array([l.inertia_zz for l in model.links])
    x_h1, x_h2 = hand_position(model, q)

    # vertical contact force from Newton: f_c = sum m a - m g - f_hand
    f_c2 = float(masses @ (acc[:, 1] - GRAVITY)) - wrench.f_h2
    if abs(f_c2) < CONTACT_FORCE_MIN:
        raise StabilityError("contact loss: vertical contact force vanished")

    moment = float(masses @ ((acc[:, 1] - GRAVITY) * pts[:, 0] - acc[:, 0] * pts[:, 1]))
    moment += float(inertias @ theta_dd)
    moment += wrench.f_h1 * x_h2 - wrench.f_h2 * x_h1
    return moment / f_c2


def support_check(
    x_zmp: float,
    margin: tuple[float, float],
    foot_extent: tuple[float, float],
) -> ZmpResult:
    """Classify a balance point against the planning margin and the foot."""
    if not (foot_extent[0] <= margin[0] < margin[1] <= foot_extent[1]):
        raise StabilityError(
            f"margin {margin} must be contained in the support interval {foot_extent}"
        )
    inside_margin = margin[0] <= x_zmp <= margin[1]
    inside_support = foot_extent[0] <= x_zmp <= foot_extent[1]
    return ZmpResult(float(x_zmp), inside_margin, inside_support)
