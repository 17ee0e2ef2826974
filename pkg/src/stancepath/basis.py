"""Bernstein basis curves and the serialized configuration manifold.

A manifold is a 1D family of full configurations q(s) for s in [0, 1],
built as q(s) = (phi(s) kron C) w where phi(s) is the Bernstein basis row,
C the coordination matrix and w the stacked control-point weights. The
weight layout is reduced-joint-major: all control points of reduced joint
0 first, then joint 1, and so on. By bilinearity, evaluating as
C @ (W @ phi(s)) with W = w reshaped (r, n) gives the same values; the
tests pin that equivalence down since the file format must stay portable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from pathlib import Path

import numpy as np

from .model import CoordinationMatrix, ModelError


class ManifoldError(ValueError):
    """Malformed manifold data or mismatched dimensions."""


@dataclass(frozen=True)
class BernsteinBasis:
    """Bernstein polynomial basis of a fixed degree (n = degree + 1 funcs)."""

    degree: int

    def __post_init__(self) -> None:
        if int(self.degree) != self.degree or self.degree < 1:
            raise ManifoldError(f"degree must be an integer >= 1, got {self.degree}")
        object.__setattr__(self, "degree", int(self.degree))

    @property
    def n(self) -> int:
        return self.degree + 1

    def row(self, s: float) -> np.ndarray:
        """Basis values at s; s is clamped to [0, 1], never extrapolated."""
        return basis_row(self, s)

    def row_derivative(self, s: float) -> np.ndarray:
        """d(phi)/ds at s (clamped), via the degree-lowering identity."""
        s = float(min(max(s, 0.0), 1.0))
        m = self.degree
        if m == 0:
            return np.zeros(1)
        lower = _bernstein_values(m - 1, s)
        out = np.zeros(m + 1)
        # phi_i' = m * (B_{i-1, m-1} - B_{i, m-1})
        out[1:] += m * lower
        out[:-1] -= m * lower
        return out


def _bernstein_values(degree: int, s: float) -> np.ndarray:
    i = np.arange(degree + 1)
    coeff = np.array([comb(degree, k) for k in i], dtype=float)
    # 0**0 = 1 handled correctly by numpy power at the endpoints
    return coeff * s**i * (1.0 - s) ** (degree - i)


def basis_row(basis: BernsteinBasis, s: float) -> np.ndarray:
    """Bernstein basis row phi(s); nonnegative entries summing to one."""
    s = float(min(max(s, 0.0), 1.0))
    return _bernstein_values(basis.degree, s)


_MANIFOLD_KEYS = {
    "degree",
    "C",
    "w",
    "f_max",
    "delta_margin",
    "hand_displacement_cap",
    "model_fingerprint",
    "created_by",
    "solver_report",
}


@dataclass(frozen=True)
class ManifoldSpec:
    """Planner output: everything needed to evaluate q(s) at runtime.

    delta_margin is the conservative (lower, upper) ZMP interval the
    manifold was planned for; f_max the largest horizontal hand force the
    plan covered. solver_report carries the summary the planner left
    behind: {iterations, final_cost, max_violation}.
    """

    basis: BernsteinBasis
    C: CoordinationMatrix
    w: np.ndarray
    f_max: float
    delta_margin: tuple[float, float]
    hand_displacement_cap: float
    model_fingerprint: str
    created_by: str = "stancepath"
    solver_report: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "w", w)
        expected = self.C.r * self.basis.n
        if w.shape != (expected,):
            raise ManifoldError(
                f"weights must have r*n = {expected} entries, got {w.shape}"
            )
        # zero is allowed so degenerate zero-force plans stay serializable;
        # runtime consumers that divide by f_max reject nonpositive values
        if self.f_max < 0.0:
            raise ManifoldError(f"f_max must be nonnegative, got {self.f_max}")
        lo, hi = self.delta_margin
        if not (lo < hi):
            raise ManifoldError(f"delta_margin must be ordered, got {self.delta_margin}")

    @property
    def d(self) -> int:
        return self.C.d

    def control_points(self) -> np.ndarray:
        """Weights reshaped (r, n): one row of control points per reduced joint."""
        return self.w.reshape(self.C.r, self.basis.n)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "degree": self.basis.degree,
            "C": self.C.entries.tolist(),
            "w": self.w.tolist(),
            "f_max": self.f_max,
            "delta_margin": [self.delta_margin[0], self.delta_margin[1]],
            "hand_displacement_cap": self.hand_displacement_cap,
            "model_fingerprint": self.model_fingerprint,
            "created_by": self.created_by,
            "solver_report": dict(self.solver_report),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ManifoldSpec":
        if not isinstance(data, dict):
            raise ManifoldError("manifold document must be a JSON object")
        unknown = set(data) - _MANIFOLD_KEYS
        if unknown:
            raise ManifoldError(f"unknown manifold fields: {sorted(unknown)}")
        required = _MANIFOLD_KEYS - {"created_by", "solver_report"}
        missing = required - set(data)
        if missing:
            raise ManifoldError(f"missing manifold fields: {sorted(missing)}")
        try:
            C = CoordinationMatrix(np.asarray(data["C"], dtype=float))
        except ModelError as exc:
            raise ManifoldError(str(exc)) from exc
        return cls(
            basis=BernsteinBasis(int(data["degree"])),
            C=C,
            w=np.asarray(data["w"], dtype=float),
            f_max=float(data["f_max"]),
            delta_margin=(float(data["delta_margin"][0]), float(data["delta_margin"][1])),
            hand_displacement_cap=float(data["hand_displacement_cap"]),
            model_fingerprint=str(data["model_fingerprint"]),
            created_by=str(data.get("created_by", "unknown")),
            solver_report=dict(data.get("solver_report", {})),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "ManifoldSpec":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ManifoldError(f"manifold file is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def eval_config(m: ManifoldSpec, s: float) -> np.ndarray:
    """Full configuration q(s) = C @ (W @ phi(s)); s clamped to [0, 1]."""
    phi = basis_row(m.basis, s)
    return m.C.entries @ (m.control_points() @ phi)


def eval_config_derivative(m: ManifoldSpec, s: float) -> np.ndarray:
    """dq/ds at s, from the analytic Bernstein derivative."""
    dphi = m.basis.row_derivative(s)
    return m.C.entries @ (m.control_points() @ dphi)


def constant_weights(C: CoordinationMatrix, basis: BernsteinBasis, q_reduced) -> np.ndarray:
    """Weights of the constant curve q(s) == C @ q_reduced."""
    q_r = np.asarray(q_reduced, dtype=float)
    if q_r.shape != (C.r,):
        raise ManifoldError(f"reduced config must have {C.r} entries, got {q_r.shape}")
    return np.repeat(q_r, basis.n)
