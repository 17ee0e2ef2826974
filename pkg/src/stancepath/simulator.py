"""Deterministic planar chain dynamics with PD tracking and hand forces.

The chain is integrated in absolute link angles Theta = cumsum(q), where
the mass matrix and bias terms of a planar serial chain have a compact
closed form: with beta = A^T diag(m) A built from the constant lever
matrix A,

    M[i, j]   = beta[i, j] cos(Theta_i - Theta_j) + delta_ij I_i
    bias[i]   = sum_j beta[i, j] sin(Theta_i - Theta_j) Thetadot_j^2
                - g_abs * gamma_i * sin(Theta_i)

(gamma = column sums of diag(m) A). Joint-space PD torques and the hand
wrench (mapped through the hand Jacobian) enter as generalized forces.
Integration is semi-implicit Euler, which keeps the stiff PD stable at
millisecond steps and conserves energy well for undriven motion.

Episodes run a 20 Hz control loop over the dynamics: each tick samples
the force profile, advances the manifold controller, integrates the
substeps with the continuously evaluated hand force, and records state
plus the dynamic balance point. An episode fails the moment the balance
point leaves the true support interval, contact is lost, a joint blows
past its limit stop, or the state stops being finite; merely leaving the
conservative planning margin is recorded but is not a failure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import ManifoldSpec
from .controller import ControllerState
from .model import RobotModel, com_lever_matrix, hand_position
from .stability import CONTACT_FORCE_MIN, HandWrench, StabilityError, zmp_dynamic


class SimulationError(ValueError):
    """Invalid simulation configuration or inconsistent artifacts."""


@dataclass(frozen=True)
class SimSettings:
    """Integration, gain and failure-detection knobs.

    Per-joint PD gains are the base values scaled by the downstream mass
    fraction (the share of total mass the joint actually carries), which
    keeps distal joints from being absurdly stiff. joint_limit_slack is
    how far past a limit the simulated joint may travel before the
    episode counts as having hit a hard stop.
    """

    dt: float = 1e-3
    substeps_per_tick: int = 50
    control_rate: float = 20.0
    kp_base: float = 12000.0
    kd_base: float = 1200.0
    # Pure PD at finite gains sags under a 95 kg chain and free-falls for
    # an instant at startup; production position loops behave as if
    # gravity-compensated, so that is the default here.
    gravity_compensation: bool = True
    # Joint drivers ramp between successive 20 Hz setpoints instead of
    # stepping them; stepping a stiff PD is an impulse hammer every tick.
    target_interpolation: bool = True
    joint_limit_slack: float = 0.15
    settle_time: float = 2.0

    def __post_init__(self) -> None:
        if not (0.0 < self.dt <= 0.01):
            raise SimulationError(f"dt must be in (0, 0.01], got {self.dt}")
        if self.substeps_per_tick < 1:
            raise SimulationError("substeps_per_tick must be at least 1")
        if self.control_rate <= 0:
            raise SimulationError("control_rate must be positive")

    @property
    def tick_dt(self) -> float:
        return self.substeps_per_tick * self.dt


@dataclass
class SimState:
    t: float
    q: np.ndarray
    qdot: np.ndarray
    applied_wrench: HandWrench
    zmp: float
    contact_ok: bool


@dataclass(frozen=True)
class ForceProfile:
    """Horizontal hand-force trajectory applied during an episode.

    kinds:
      sinusoid  -- f(t) = M sin(pi t / (2 h)) for 0 <= t <= 2h, else 0;
                   rises to the peak M at t = h and returns to zero at 2h.
      piecewise -- zero-order hold over (t, f) samples.
      recorded  -- linear interpolation over (t, f) samples.
    """

    kind: str = "sinusoid"
    M: float = 100.0
    h: float = 2.0
    duration: float | None = None
    samples: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("sinusoid", "piecewise", "recorded"):
            raise SimulationError(f"unknown force profile kind {self.kind!r}")
        if self.kind == "sinusoid":
            if self.M < 0.0:
                raise SimulationError("peak force M must be nonnegative")
            if not self.h > 0.0:
                raise SimulationError("rise time h must be positive")
        else:
            if self.samples is None:
                raise SimulationError(f"{self.kind} profile needs samples")
            samples = np.asarray(self.samples, dtype=float)
            if samples.ndim != 2 or samples.shape[1] != 2 or len(samples) == 0:
                raise SimulationError("samples must be a nonempty (N, 2) array of (t, f)")
            if np.any(np.diff(samples[:, 0]) < 0):
                raise SimulationError("sample times must be nondecreasing")
            object.__setattr__(self, "samples", samples)

    def span(self) -> float:
        """Time after which the profile is identically its final value."""
        if self.kind == "sinusoid":
            return 2.0 * self.h
        return float(self.samples[-1, 0])

    def __call__(self, t: float) -> float:
        return force_profile_eval(self, t)


def force_profile_eval(profile: ForceProfile, t: float) -> float:
    """Force value at time t >= 0."""
    if t < 0.0:
        raise SimulationError(f"profile time must be nonnegative, got {t}")
    if profile.kind == "sinusoid":
        if t > 2.0 * profile.h:
            return 0.0
        return float(profile.M * math.sin(math.pi * t / (2.0 * profile.h)))
    ts, fs = profile.samples[:, 0], profile.samples[:, 1]
    if profile.kind == "piecewise":
        idx = int(np.searchsorted(ts, t, side="right")) - 1
        return float(fs[max(idx, 0)])
    return float(np.interp(t, ts, fs))


class ChainDynamics:
    """Forward dynamics of the fixed-base planar chain.

    The stiff joint damping required by realistic PD gains is treated
    implicitly in the velocity update (solve against M + dt * D), which
    is unconditionally stable; stiffness stays explicit and its modal
    frequencies are far below the step rate.
    """

    def __init__(self, model: RobotModel, settings: SimSettings):
        self.model = model
        self.settings = settings
        n = model.n_joints
        masses = np.array([l.mass for l in model.links])
        A = com_lever_matrix(model)
        self.beta = A.T @ (masses[:, None] * A)
        self.gamma = masses @ A
        self.inertia = np.diag([l.inertia_zz for l in model.links])
        self.lengths = np.array([l.length for l in model.links])
        down_mass = np.cumsum(masses[::-1])[::-1] / model.total_mass
        self.kp = settings.kp_base * down_mass
        self.kd = settings.kd_base * down_mass
        self.hand_index = model.hand_link_index
        # joint damping in absolute-angle coordinates: L^-T diag(kd) L^-1
        Linv = np.linalg.inv(np.tril(np.ones((n, n))))
        self.damping = Linv.T @ (self.kd[:, None] * Linv)

    def torques_explicit(self, q: np.ndarray, q_target: np.ndarray) -> np.ndarray:
        """Proportional plus (optional) gravity-holding torques."""
        tau = self.kp * (q_target - q)
        if self.settings.gravity_compensation:
            tau = tau + self.gravity_torques(np.cumsum(q))
        return tau

    def gravity_torques(self, theta: np.ndarray) -> np.ndarray:
        """Joint torques exactly holding the chain against gravity."""
        gen = -9.81 * self.gamma * np.sin(theta)
        return np.cumsum(gen[::-1])[::-1]

    def accel(
        self,
        theta: np.ndarray,
        theta_dot: np.ndarray,
        tau_q: np.ndarray,
        wrench: HandWrench,
        dt_damping: float = 0.0,
        damped: bool = True,
    ) -> np.ndarray:
        diff = theta[:, None] - theta[None, :]
        M = self.beta * np.cos(diff) + self.inertia
        bias = (self.beta * np.sin(diff)) @ theta_dot**2
        bias -= 9.81 * self.gamma * np.sin(theta)
        # joint torques to absolute-angle generalized forces: tau_q_i acts
        # on Theta_i and reacts on Theta_{i-1} through the proximal link
        gen = tau_q.copy()
        gen[:-1] -= tau_q[1:]
        # hand wrench through the hand Jacobian (absolute-angle coordinates)
        h = self.hand_index
        f = np.array([wrench.f_h1, wrench.f_h2])
        gen[: h + 1] += self.lengths[: h + 1] * (
            -np.cos(theta[: h + 1]) * f[0] - np.sin(theta[: h + 1]) * f[1]
        )
        rhs = gen - bias
        if not damped:
            return np.linalg.solve(M, rhs)
        rhs = rhs - self.damping @ theta_dot
        return np.linalg.solve(M + dt_damping * self.damping, rhs)


def dynamics_step(
    model: RobotModel,
    state: SimState,
    joint_targets: np.ndarray,
    wrench: HandWrench,
    dt: float,
    settings: SimSettings | None = None,
    engine: ChainDynamics | None = None,
    apply_pd: bool = True,
) -> SimState:
    """Advance the chain one semi-implicit Euler step of size dt."""
    settings = settings if settings is not None else SimSettings(dt=dt)
    if not (0.0 < dt <= 0.01):
        raise SimulationError(f"dt must be in (0, 0.01], got {dt}")
    engine = engine if engine is not None else ChainDynamics(model, settings)
    q = model.check_q(state.q)
    qdot = model.check_q(state.qdot)
    theta = np.cumsum(q)
    theta_dot = np.cumsum(qdot)
    if apply_pd:
        tau = engine.torques_explicit(q, np.asarray(joint_targets, float))
        theta_dd = engine.accel(theta, theta_dot, tau, wrench, dt_damping=dt, damped=True)
    else:
        theta_dd = engine.accel(theta, theta_dot, np.zeros_like(q), wrench, damped=False)
    theta_dot = theta_dot + dt * theta_dd
    theta = theta + dt * theta_dot
    q_new = np.diff(theta, prepend=0.0)
    qdot_new = np.diff(theta_dot, prepend=0.0)
    contact_ok = True
    try:
        qdd_new = np.diff(theta_dd, prepend=0.0)
        zmp = zmp_dynamic(model, q_new, qdot_new, qdd_new, wrench)
    except StabilityError:
        zmp = math.nan
        contact_ok = False
    if not (np.all(np.isfinite(q_new)) and np.all(np.isfinite(qdot_new))):
        raise SimulationError("simulation state became non-finite")
    return SimState(
        t=state.t + dt,
        q=q_new,
        qdot=qdot_new,
        applied_wrench=wrench,
        zmp=zmp,
        contact_ok=contact_ok,
    )


@dataclass
class EpisodeResult:
    """One simulated interaction: verdict plus the recorded time series.

    The trace holds one row per control tick: time at the end of the
    tick, the force the controller measured, the commanded manifold
    position, the joint state, the dynamic balance point and the two
    support flags. margin_exceeded reports whether the conservative
    planning margin was ever left, which by itself is not a failure.
    """

    success: bool
    failure_reason: str | None
    t: np.ndarray
    f_h1: np.ndarray
    s: np.ndarray
    q: np.ndarray
    zmp: np.ndarray
    inside_margin: np.ndarray
    inside_support: np.ndarray
    max_abs_zmp: float
    margin_exceeded: bool
    failure_time: float | None = None

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "failure_reason": self.failure_reason,
            "failure_time": self.failure_time,
            "max_abs_zmp": self.max_abs_zmp,
            "margin_exceeded": self.margin_exceeded,
            "ticks": len(self.t),
        }

    def save_csv(self, path) -> None:
        Path(path).write_text(episode_csv(self))


def episode_csv(result: EpisodeResult) -> str:
    d = result.q.shape[1]
    header = ["t", "f_h1", "s"] + [f"q{i}" for i in range(d)] + [
        "x_zmp", "inside_margin", "inside_support",
    ]
    lines = [",".join(header)]
    for i in range(len(result.t)):
        row = [f"{result.t[i]:.6f}", f"{result.f_h1[i]:.9g}", f"{result.s[i]:.9g}"]
        row += [f"{v:.9g}" for v in result.q[i]]
        row += [
            f"{result.zmp[i]:.9g}",
            str(int(result.inside_margin[i])),
            str(int(result.inside_support[i])),
        ]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


class TickSession:
    """Shared 20 Hz control-loop engine for scripted and interactive runs.

    One tick measures the hand force, advances the manifold controller,
    integrates the substeps (by default holding the measured force for
    the whole tick; a callable force source evaluates it per substep) and
    returns a state record. Failure state is sticky: once a tick fails,
    the session refuses further ticks until reset.
    """

    def __init__(
        self,
        model: RobotModel,
        manifold: ManifoldSpec,
        controller: ControllerState | None = None,
        settings: SimSettings | None = None,
        check_fingerprint: bool = True,
    ):
        if manifold.d != model.n_joints:
            raise SimulationError("manifold dimension does not match the model")
        if check_fingerprint and manifold.model_fingerprint != model.fingerprint():
            raise SimulationError(
                "manifold was planned for a different model; pass "
                "check_fingerprint=False to run anyway"
            )
        self.model = model
        self.manifold = manifold
        self.settings = settings if settings is not None else SimSettings()
        self.controller = (
            controller
            if controller is not None
            else ControllerState(manifold=manifold, rate=self.settings.control_rate)
        )
        self.engine = ChainDynamics(model, self.settings)
        self.margin = manifold.delta_margin
        self.reset()

    def reset(self) -> None:
        self.controller.reset()
        self.tick_count = 0
        q0 = np.asarray(self.controller.target(), dtype=float)
        self._last_target = q0.copy()
        self.state = SimState(
            t=0.0,
            q=q0,
            qdot=np.zeros(self.model.n_joints),
            applied_wrench=HandWrench(),
            zmp=float(zmp_dynamic(self.model, q0, np.zeros_like(q0), np.zeros_like(q0), HandWrench())),
            contact_ok=True,
        )
        self.failure: str | None = None
        self.failure_time: float | None = None
        self.max_abs_zmp = abs(self.state.zmp)
        self.margin_exceeded = not (self.margin[0] <= self.state.zmp <= self.margin[1])

    def _check_failure(self, state: SimState) -> str | None:
        if not state.contact_ok:
            return "contact_loss"
        if not (np.all(np.isfinite(state.q)) and math.isfinite(state.zmp)):
            return "numerical"
        fe = self.model.foot_extent
        if not (fe[0] <= state.zmp <= fe[1]):
            return "zmp_exceeded_support"
        if not self.model.within_limits(state.q, slack=self.settings.joint_limit_slack):
            return "joint_limit"
        return None

    def tick(self, measured_force: float, force_fn=None, f_h2: float = 0.0) -> dict:
        """Advance one control period; returns the end-of-tick record.

        The controller only ever sees the horizontal force; an optional
        vertical component is applied to the dynamics, held for the tick.
        """
        if self.failure is not None:
            raise SimulationError("session already failed; reset() before more ticks")
        settings = self.settings
        # tick-counted time: exact multiples of the tick period, so profile
        # sample boundaries land on tick boundaries without float drift
        t_start = self.tick_count * settings.tick_dt
        target = np.asarray(self.controller.step(measured_force, settings.tick_dt), float)
        prev_target = self._last_target
        self._last_target = target
        state = self.state
        for k in range(settings.substeps_per_tick):
            t_sub = t_start + k * settings.dt
            f_sub = measured_force if force_fn is None else float(force_fn(t_sub))
            wrench = HandWrench(f_h1=f_sub, f_h2=f_h2)
            if settings.target_interpolation:
                frac = (k + 1) / settings.substeps_per_tick
                sub_target = prev_target + frac * (target - prev_target)
            else:
                sub_target = target
            try:
                state = dynamics_step(
                    self.model, state, sub_target, wrench, settings.dt,
                    settings=settings, engine=self.engine,
                )
            except SimulationError:
                self.failure = "numerical"
                self.failure_time = t_sub
                break
            reason = self._check_failure(state)
            if math.isfinite(state.zmp):
                self.max_abs_zmp = max(self.max_abs_zmp, abs(state.zmp))
                if not (self.margin[0] <= state.zmp <= self.margin[1]):
                    self.margin_exceeded = True
            if reason is not None:
                self.failure = reason
                self.failure_time = state.t
                break
        self.tick_count += 1
        if self.failure is None:
            state.t = self.tick_count * settings.tick_dt
        self.state = state
        return self.record(measured_force)

    def record(self, measured_force: float = 0.0) -> dict:
        zmp = self.state.zmp
        return {
            "t": self.state.t,
            "f_applied": float(measured_force),
            "s": self.controller.s_current,
            "q": self.state.q.copy(),
            "zmp": zmp,
            "inside_margin": bool(self.margin[0] <= zmp <= self.margin[1]),
            "inside_support": bool(
                self.model.foot_extent[0] <= zmp <= self.model.foot_extent[1]
            ),
            "failure": self.failure,
        }


def run_episode(
    model: RobotModel,
    manifold: ManifoldSpec,
    profile: ForceProfile,
    settings: SimSettings | None = None,
    controller: ControllerState | None = None,
    check_fingerprint: bool = True,
) -> EpisodeResult:
    """Simulate one force-profile episode against a planned manifold."""
    settings = settings if settings is not None else SimSettings()
    session = TickSession(
        model, manifold, controller=controller, settings=settings,
        check_fingerprint=check_fingerprint,
    )
    duration = profile.duration
    if duration is None:
        duration = profile.span() + settings.settle_time
    n_ticks = int(round(duration / settings.tick_dt))
    rows = [session.record(force_profile_eval(profile, 0.0))]
    for k in range(n_ticks):
        t_tick = k * settings.tick_dt
        f_meas = force_profile_eval(profile, t_tick)
        rows.append(session.tick(f_meas, force_fn=profile))
        if session.failure is not None:
            break
    return EpisodeResult(
        success=session.failure is None,
        failure_reason=session.failure,
        failure_time=session.failure_time,
        t=np.array([r["t"] for r in rows]),
        f_h1=np.array([r["f_applied"] for r in rows]),
        s=np.array([r["s"] for r in rows]),
        q=np.stack([r["q"] for r in rows]),
        zmp=np.array([r["zmp"] for r in rows]),
        inside_margin=np.array([r["inside_margin"] for r in rows], dtype=bool),
        inside_support=np.array([r["inside_support"] for r in rows], dtype=bool),
        max_abs_zmp=float(session.max_abs_zmp),
        margin_exceeded=bool(session.margin_exceeded),
    )
