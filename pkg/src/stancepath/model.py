"""Planar articulated chain: kinematics, mass properties, joint coupling.

Conventions used throughout the package:

* The chain lives in the sagittal x-z plane, x pointing forward (anterior,
  toward the person being assisted) and z pointing up.
* The chain is rooted at the ankle, placed at the origin.
* Joint angles are relative: ``q[i]`` rotates link ``i`` with respect to
  link ``i - 1``. With ``q = 0`` everywhere the chain points straight up.
* Positive rotation is counter-clockwise in the x-z plane, so a single
  link of length 1 at ``q = [pi/2]`` has its tip at ``(-1, 0)``.
* Gravity is stored as ``GRAVITY = -9.81`` so the static balance formulas
  can be written symbol-for-symbol without sign juggling.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

GRAVITY = -9.81  # m/s^2, z-up convention (negative number on purpose)


class ModelError(ValueError):
    """Invalid robot description or configuration input."""


@dataclass(frozen=True)
class LinkSpec:
    """One rigid link of the planar chain.

    length:     joint-to-joint distance in meters.
    mass:       link mass in kg (lumped masses allowed, e.g. torso+head).
    com_offset: distance of the link center of mass from the proximal
                joint, along the link, in meters.
    inertia_zz: rotational inertia about the link CoM, kg*m^2. Only the
                simulator uses it; statics ignore it.
    """

    length: float
    mass: float
    com_offset: float
    inertia_zz: float = 0.0

    def __post_init__(self) -> None:
        if not (self.length > 0.0):
            raise ModelError(f"link length must be positive, got {self.length}")
        if self.mass < 0.0:
            raise ModelError(f"link mass must be nonnegative, got {self.mass}")
        if not (0.0 <= self.com_offset <= self.length):
            raise ModelError(
                f"com_offset {self.com_offset} outside [0, {self.length}]"
            )
        if self.inertia_zz < 0.0:
            raise ModelError(f"inertia_zz must be nonnegative, got {self.inertia_zz}")


_MODEL_KEYS = {"links", "foot_extent", "default_config", "joint_limits", "hand_link_index"}
_LINK_KEYS = {"length", "mass", "com_offset", "inertia_zz"}


@dataclass(frozen=True)
class RobotModel:
    """Planar chain with mass properties, joint limits and foot support.

    ``foot_extent`` is the true support interval (x_min, x_max) on the
    ground, in meters, relative to the ankle projection. ``default_config``
    is the nominal ready pose; it doubles as the planner anchor.
    """

    links: tuple[LinkSpec, ...]
    foot_extent: tuple[float, float]
    default_config: np.ndarray
    joint_limits: np.ndarray  # shape (n_joints, 2), [lower, upper] rad
    hand_link_index: int
    total_mass: float = field(init=False)

    def __post_init__(self) -> None:
        if len(self.links) == 0:
            raise ModelError("model needs at least one link")
        object.__setattr__(self, "links", tuple(self.links))
        q = np.asarray(self.default_config, dtype=float)
        lim = np.asarray(self.joint_limits, dtype=float)
        object.__setattr__(self, "default_config", q)
        object.__setattr__(self, "joint_limits", lim)
        n = len(self.links)
        if q.shape != (n,):
            raise ModelError(f"default_config must have {n} entries, got {q.shape}")
        if lim.shape != (n, 2):
            raise ModelError(f"joint_limits must be shaped ({n}, 2), got {lim.shape}")
        if np.any(lim[:, 0] >= lim[:, 1]):
            raise ModelError("each joint limit pair must satisfy lower < upper")
        if np.any(q < lim[:, 0]) or np.any(q > lim[:, 1]):
            raise ModelError("default_config violates joint_limits")
        if not (self.foot_extent[0] < self.foot_extent[1]):
            raise ModelError(f"foot_extent must be ordered, got {self.foot_extent}")
        if not (0 <= self.hand_link_index < n):
            raise ModelError(f"hand_link_index {self.hand_link_index} out of range")
        total = float(sum(l.mass for l in self.links))
        if not (total > 0.0):
            raise ModelError("total mass must be strictly positive")
        object.__setattr__(self, "total_mass", total)

    @property
    def n_joints(self) -> int:
        return len(self.links)

    def check_q(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if q.shape != (self.n_joints,):
            raise ModelError(
                f"configuration must have {self.n_joints} entries, got shape {q.shape}"
            )
        return q

    def within_limits(self, q, slack: float = 0.0) -> bool:
        q = self.check_q(q)
        lo, hi = self.joint_limits[:, 0], self.joint_limits[:, 1]
        return bool(np.all(q >= lo - slack) and np.all(q <= hi + slack))

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "links": [
                {
                    "length": l.length,
                    "mass": l.mass,
                    "com_offset": l.com_offset,
                    "inertia_zz": l.inertia_zz,
                }
                for l in self.links
            ],
            "foot_extent": [self.foot_extent[0], self.foot_extent[1]],
            "default_config": self.default_config.tolist(),
            "joint_limits": self.joint_limits.tolist(),
            "hand_link_index": self.hand_link_index,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RobotModel":
        if not isinstance(data, dict):
            raise ModelError("robot model document must be a JSON object")
        unknown = set(data) - _MODEL_KEYS
        if unknown:
            raise ModelError(f"unknown robot model fields: {sorted(unknown)}")
        missing = _MODEL_KEYS - set(data)
        if missing:
            raise ModelError(f"missing robot model fields: {sorted(missing)}")
        links = []
        for i, entry in enumerate(data["links"]):
            bad = set(entry) - _LINK_KEYS
            if bad:
                raise ModelError(f"unknown fields in links[{i}]: {sorted(bad)}")
            links.append(
                LinkSpec(
                    length=float(entry["length"]),
                    mass=float(entry["mass"]),
                    com_offset=float(entry["com_offset"]),
                    inertia_zz=float(entry.get("inertia_zz", 0.0)),
                )
            )
        return cls(
            links=tuple(links),
            foot_extent=(float(data["foot_extent"][0]), float(data["foot_extent"][1])),
            default_config=np.asarray(data["default_config"], dtype=float),
            joint_limits=np.asarray(data["joint_limits"], dtype=float),
            hand_link_index=int(data["hand_link_index"]),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "RobotModel":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ModelError(f"robot model file is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def fingerprint(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class CoordinationMatrix:
    """Linear map from reduced joint coordinates to the full joint vector.

    q_full = C @ q_reduced. Identity decouples all joints; a paired map
    copies each reduced value to a left/right joint pair, which is how a
    symmetric biped collapses 14 active joints onto 7.
    """

    entries: np.ndarray  # shape (d, r)

    def __post_init__(self) -> None:
        C = np.asarray(self.entries, dtype=float)
        if C.ndim != 2:
            raise ModelError(f"coordination matrix must be 2D, got ndim={C.ndim}")
        if np.any(np.all(C == 0.0, axis=0)):
            raise ModelError("coordination matrix has an all-zero column")
        object.__setattr__(self, "entries", C)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    @property
    def r(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def identity(cls, d: int) -> "CoordinationMatrix":
        return cls(np.eye(d))

    @classmethod
    def paired(cls, r: int) -> "CoordinationMatrix":
        """2r x r map copying reduced joint j to full joints 2j and 2j+1."""
        C = np.zeros((2 * r, r))
        for j in range(r):
            C[2 * j, j] = 1.0
            C[2 * j + 1, j] = 1.0
        return cls(C)


def expand_config(C: CoordinationMatrix, q_reduced) -> np.ndarray:
    """Map a reduced configuration through the coordination matrix."""
    q_r = np.asarray(q_reduced, dtype=float)
    if q_r.shape != (C.r,):
        raise ModelError(f"reduced config must have {C.r} entries, got {q_r.shape}")
    return C.entries @ q_r


# -- chain geometry -------------------------------------------------------
#
# Throughout, Theta = cumsum(q) are absolute link angles and the unit
# direction of link k is u(Theta_k) = (-sin Theta_k, cos Theta_k).
# Any point rigidly attached to the chain is sum_j A[k, j] * u(Theta_j)
# for a constant lever matrix A, which makes Jacobians and the equations
# of motion almost mechanical to write down.


def absolute_angles(model: RobotModel, q) -> np.ndarray:
    return np.cumsum(model.check_q(q))


def _unit(theta: np.ndarray) -> np.ndarray:
    return np.stack([-np.sin(theta), np.cos(theta)], axis=-1)


def _unit_prime(theta: np.ndarray) -> np.ndarray:
    return np.stack([-np.cos(theta), -np.sin(theta)], axis=-1)


def com_lever_matrix(model: RobotModel) -> np.ndarray:
    """Constant matrix A with link-CoM points c_k = sum_j A[k,j] u(Theta_j).

    A[k, j] = length_j for j < k, com_offset_k for j = k, zero above the
    diagonal.
    """
    n = model.n_joints
    A = np.zeros((n, n))
    for k in range(n):
        for j in range(k):
            A[k, j] = model.links[j].length
        A[k, k] = model.links[k].com_offset
    return A


def forward_kinematics(model: RobotModel, q) -> np.ndarray:
    """Distal-end positions of every link, shape (n_joints, 2).

    Row i is the (x, z) position of the far end of link i; the chain is
    rooted at the ankle at the origin.
    """
    theta = absolute_angles(model, q)
    lengths = np.array([l.length for l in model.links])
    steps = lengths[:, None] * _unit(theta)
    return np.cumsum(steps, axis=0)


def frame_points(model: RobotModel, q) -> np.ndarray:
    """Like forward_kinematics but with the ankle origin prepended."""
    tips = forward_kinematics(model, q)
    return np.vstack([np.zeros(2), tips])


def link_com_points(model: RobotModel, q) -> np.ndarray:
    """Per-link center-of-mass positions, shape (n_joints, 2)."""
    theta = absolute_angles(model, q)
    return com_lever_matrix(model) @ _unit(theta)


def com_position(model: RobotModel, q) -> tuple[float, float]:
    """Whole-body center of mass (x, z) in meters."""
    masses = np.array([l.mass for l in model.links])
    com = masses @ link_com_points(model, q) / model.total_mass
    return float(com[0]), float(com[1])


def hand_position(model: RobotModel, q) -> tuple[float, float]:
    """Hand attachment point (x_h1, x_h2): horizontal and vertical coords."""
    tips = forward_kinematics(model, q)
    x, z = tips[model.hand_link_index]
    return float(x), float(z)


def com_x_gradient(model: RobotModel, q) -> np.ndarray:
    """d(x_com)/dq, shape (n_joints,)."""
    theta = absolute_angles(model, q)
    masses = np.array([l.mass for l in model.links])
    # d(c_kx)/dTheta_j = -A[k,j] cos(Theta_j)
    dx_dtheta = -(masses @ com_lever_matrix(model)) * np.cos(theta) / model.total_mass
    # Theta = L q with L lower-triangular ones: d/dq_i = sum_{j>=i} d/dTheta_j
    return np.cumsum(dx_dtheta[::-1])[::-1]


def hand_jacobian(model: RobotModel, q) -> np.ndarray:
    """d(hand)/dq, shape (2, n_joints); rows are (x, z) derivatives."""
    theta = absolute_angles(model, q)
    n = model.n_joints
    h = model.hand_link_index
    dtheta = np.zeros((2, n))
    for j in range(h + 1):
        lj = model.links[j].length
        dtheta[0, j] = -lj * np.cos(theta[j])
        dtheta[1, j] = -lj * np.sin(theta[j])
    return np.cumsum(dtheta[:, ::-1], axis=1)[:, ::-1]


def link_com_kinematics(
    model: RobotModel, q, qdot, qddot
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Positions, velocities and accelerations of every link CoM.

    Returns (points, velocities, accelerations, theta_ddot) where the
    first three are (n_joints, 2) arrays and theta_ddot are the absolute
    angular accelerations needed for the rotational ZMP term.
    """
    q = model.check_q(q)
    qdot = model.check_q(qdot)
    qddot = model.check_q(qddot)
    theta = np.cumsum(q)
    theta_d = np.cumsum(qdot)
    theta_dd = np.cumsum(qddot)
    A = com_lever_matrix(model)
    u = _unit(theta)
    up = _unit_prime(theta)
    pts = A @ u
    vel = A @ (up * theta_d[:, None])
    # u'' = -u, so c_ddot = A (u' theta_dd - u theta_d^2)
    acc = A @ (up * theta_dd[:, None] - u * theta_d[:, None] ** 2)
    return pts, vel, acc, theta_dd
