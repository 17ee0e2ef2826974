"""Terminal-configuration planning over a Bernstein-weighted manifold.

Two cost families are supported. The standard cost squares the balance
point at the force actually assigned to a sample. The robust cost sweeps
every force from zero to the configured maximum and sums squared hinge
violations of the planning margin, so a single configuration is graded by
how well it tolerates the whole force range, not one point of it.

The solve finds weights w minimizing the summed cost over an s-grid
subject to, at every grid sample: joint limits on q(s), the balance point
at f(s) = s * f_max staying inside the margin, the hand staying within a
displacement cap of its anchor position, and q(0) pinned to the anchor
pose (exact, via Bernstein endpoint interpolation -- the first control
point column is simply not a decision variable).

Margin and cap constraints are additionally re-checked on a 10x finer
grid after each solve; any violating locations are appended to the
constraint set and the problem re-solved (a small exchange method), so
the emitted manifold honors its tolerances between grid samples too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .basis import BernsteinBasis, ManifoldSpec, basis_row, constant_weights, eval_config
from .model import (
    CoordinationMatrix,
    RobotModel,
    com_position,
    com_x_gradient,
    hand_jacobian,
    hand_position,
)
from .stability import zmp_static_simplified


class PlannerError(ValueError):
    """Ill-posed planning problem or mismatched artifacts."""


_G_ABS = 9.81

#: Tie-breaking regularizer weight on ||w - w_anchor||^2; the robust cost
#: has flat zero-cost regions, this makes the optimum unique.
_REG = 1e-6


@dataclass(frozen=True)
class SolverSettings:
    """Numerical knobs for the constrained solve.

    Tolerances are the acceptance thresholds for constraint residuals:
    meters for the balance-point margin and the hand cap, radians for
    joint limits. Restarts perturb the initial control points with a
    seeded generator; the best feasible outcome wins, ties broken by
    restart index so repeated runs are bit-identical.
    """

    max_iterations: int = 200
    zmp_tolerance: float = 1e-4  # m
    joint_tolerance: float = 1e-4  # rad
    ftol: float = 1e-10
    fd_step: float = 1e-7
    random_restarts: int = 2
    restart_scale: float = 0.25  # rad
    seed: int = 0
    refine_rounds: int = 6
    refine_points_per_round: int = 4
    # Weight on squared second differences of the control points. The
    # margin-hinge objective is flat over large regions of weight space
    # and admits wildly oscillating optima; this picks the smooth one.
    smoothness_weight: float = 3e-4

    def __post_init__(self) -> None:
        if self.zmp_tolerance <= 0 or self.joint_tolerance <= 0:
            raise PlannerError("constraint tolerances must be positive")
        if self.max_iterations < 1:
            raise PlannerError("max_iterations must be at least 1")


@dataclass(frozen=True)
class PlannerProblem:
    """Everything the solve needs: model, discretization, margins, solver.

    D_samples counts s-grid points including both endpoints (the default
    20 means D = 19 subintervals). force_penalty_samples discretizes the
    robust cost's force sweep over [0, f_max]. A constant planning
    vertical force may be supplied; the balance point then uses the full
    static formula instead of the simplified one.
    """

    model: RobotModel
    degree: int = 10
    C: CoordinationMatrix | None = None
    f_max: float = 200.0
    delta_margin: tuple[float, float] = (-0.05, 0.05)
    D_samples: int = 20
    force_penalty_samples: int = 21
    hand_displacement_cap: float = 0.10
    anchor_config: np.ndarray | None = None
    planning_f_h2: float = 0.0
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self) -> None:
        C = self.C if self.C is not None else CoordinationMatrix.identity(self.model.n_joints)
        object.__setattr__(self, "C", C)
        if C.d != self.model.n_joints:
            raise PlannerError(
                f"coordination matrix has {C.d} rows but the model has "
                f"{self.model.n_joints} joints"
            )
        anchor = self.anchor_config
        anchor = self.model.default_config if anchor is None else np.asarray(anchor, float)
        anchor = self.model.check_q(anchor)
        object.__setattr__(self, "anchor_config", anchor)
        if self.D_samples < 2:
            raise PlannerError("D_samples must be at least 2")
        if self.force_penalty_samples < 2 and self.f_max > 0:
            raise PlannerError("force_penalty_samples must be at least 2")
        if self.f_max < 0:
            raise PlannerError("f_max must be nonnegative")
        lo, hi = self.delta_margin
        fe = self.model.foot_extent
        if not (fe[0] <= lo < hi <= fe[1]):
            raise PlannerError(
                f"margin {self.delta_margin} must sit inside the support {fe}"
            )
        if self.hand_displacement_cap <= 0:
            raise PlannerError("hand_displacement_cap must be positive")
        if abs(self.planning_f_h2) >= _G_ABS * self.model.total_mass:
            raise PlannerError("planning vertical force exceeds the robot weight")
        if not self.model.within_limits(anchor):
            raise PlannerError("anchor_config violates joint limits")

    @property
    def s_grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.D_samples)

    @property
    def force_grid(self) -> np.ndarray:
        if self.f_max == 0.0:
            return np.zeros(1)
        return np.linspace(0.0, self.f_max, self.force_penalty_samples)

    def reduced_anchor(self) -> np.ndarray:
        """Anchor expressed in reduced coordinates; errors if inexpressible."""
        C = self.C.entries
        a, *_ = np.linalg.lstsq(C, self.anchor_config, rcond=None)
        if np.max(np.abs(C @ a - self.anchor_config)) > 1e-9:
            raise PlannerError(
                "anchor_config is not representable through the coordination matrix"
            )
        return a


@dataclass
class SolveReport:
    """Solve (or re-check) outcome with residuals and the balance trace.

    max_violation is the worst residual across all constraint families in
    native units (meters for margin/cap, radians for joints), evaluated on
    a fine grid, not only the solve grid. zmp_trace holds one
    (s, force, balance point) triple per planning sample. converged is
    true only when every family's fine-grid residual is within its
    tolerance.
    """

    mode: str
    converged: bool
    iterations: int
    final_cost: float
    max_violation: float
    max_zmp_violation: float
    max_joint_violation: float
    max_hand_violation: float
    robust_cost: float
    robust_cost_floor: float
    zero_cost_attainable: bool
    s_grid: list
    zmp_trace: list
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "converged": self.converged,
            "iterations": self.iterations,
            "final_cost": self.final_cost,
            "max_violation": self.max_violation,
            "max_zmp_violation": self.max_zmp_violation,
            "max_joint_violation": self.max_joint_violation,
            "max_hand_violation": self.max_hand_violation,
            "robust_cost": self.robust_cost,
            "robust_cost_floor": self.robust_cost_floor,
            "zero_cost_attainable": self.zero_cost_attainable,
            "s_grid": list(self.s_grid),
            "zmp_trace": [list(row) for row in self.zmp_trace],
            "message": self.message,
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")


# -- costs ----------------------------------------------------------------


def cost_standard(model: RobotModel, q, f_h1: float) -> float:
    """Squared simplified-static balance point at the given force."""
    return float(zmp_static_simplified(model, q, f_h1) ** 2)


def cost_robust(
    model: RobotModel,
    q,
    f_max: float,
    margin: tuple[float, float],
    force_penalty_samples: int = 21,
) -> float:
    """Summed squared hinge violations of the margin over the force sweep."""
    if f_max == 0.0:
        forces = np.zeros(1)
    else:
        forces = np.linspace(0.0, f_max, force_penalty_samples)
    x_com, _ = com_position(model, q)
    _, x_h2 = hand_position(model, q)
    zmps = x_com + forces * x_h2 / (_G_ABS * model.total_mass)
    hi = np.maximum(zmps - margin[1], 0.0)
    lo = np.maximum(margin[0] - zmps, 0.0)
    return float(np.sum(hi**2) + np.sum(lo**2))


def robust_cost_floor(problem: PlannerProblem) -> tuple[float, bool]:
    """Estimated lower bound on the robust objective over all feasible w.

    The robust cost of a configuration depends only on its CoM abscissa
    and hand height. Relaxing the CoM to be free and the hand height to
    anywhere the displacement cap allows leaves, per sample, a 1D convex
    placement problem: slide an affine force-to-balance band so its hinge
    violations of the margin are smallest. Scanning hand heights gives a
    per-sample floor; zero total floor means the flat zero-cost region is
    geometrically reachable.
    """
    _, z0 = hand_position(problem.model, problem.anchor_config)
    cap = problem.hand_displacement_cap
    mg = _G_ABS * problem.model.total_mass
    lo, hi = problem.delta_margin
    forces = problem.force_grid

    def placement_cost(z: float) -> float:
        k = z / mg

        def hinge_sum(b: float) -> float:
            zmps = b + forces * k
            return float(
                np.sum(np.maximum(zmps - hi, 0.0) ** 2)
                + np.sum(np.maximum(lo - zmps, 0.0) ** 2)
            )

        width = abs(forces[-1] - forces[0]) * abs(k)
        res = minimize_scalar(
            hinge_sum, bounds=(lo - width - 0.5, hi + width + 0.5), method="bounded",
            options={"xatol": 1e-10},
        )
        return float(res.fun)

    z_values = np.linspace(z0 - cap, z0 + cap, 41)
    per_sample_floor = min(placement_cost(z) for z in z_values)
    total = per_sample_floor * problem.D_samples
    return total, bool(total <= 1e-12)


# -- the nonlinear program over free control points -----------------------


class _ManifoldNLP:
    """Objective, constraints and their gradients over the free weights.

    Decision variables are the control-point matrix W (r x n) minus its
    pinned first column, flattened row-major. All per-sample kinematic
    quantities are cached keyed on the variable bytes because SLSQP
    evaluates functions and jacobians separately.
    """

    def __init__(self, problem: PlannerProblem, mode: str, con_s: np.ndarray):
        self.p = problem
        self.mode = mode
        self.C = problem.C.entries
        self.d, self.r = self.C.shape
        self.n = problem.degree + 1
        self.anchor_reduced = problem.reduced_anchor()
        self.hand0 = np.array(hand_position(problem.model, problem.anchor_config))
        self.mg = _G_ABS * problem.model.total_mass
        self.fh2 = problem.planning_f_h2
        self.cost_s = problem.s_grid
        self.con_s = np.asarray(con_s, dtype=float)
        self.phi_cost = np.stack([basis_row(BernsteinBasis(problem.degree), s) for s in self.cost_s])
        self.phi_con = np.stack([basis_row(BernsteinBasis(problem.degree), s) for s in self.con_s])
        self.forces = problem.force_grid
        # roughness quadratic: sum over joints of ||second differences||^2
        D2 = np.zeros((self.n - 2, self.n)) if self.n > 2 else np.zeros((0, self.n))
        for i in range(self.n - 2):
            D2[i, i : i + 3] = (1.0, -2.0, 1.0)
        self._rough_K = D2.T @ D2
        self._cache_x: bytes | None = None
        self._cache: dict = {}

    @property
    def n_free(self) -> int:
        return self.r * (self.n - 1)

    def initial_point(self) -> np.ndarray:
        return np.repeat(self.anchor_reduced, self.n - 1)

    def weights_from_free(self, x: np.ndarray) -> np.ndarray:
        W = np.empty((self.r, self.n))
        W[:, 0] = self.anchor_reduced
        W[:, 1:] = x.reshape(self.r, self.n - 1)
        return W.ravel()

    def _configs(self, x: np.ndarray, phi: np.ndarray) -> np.ndarray:
        W = np.empty((self.r, self.n))
        W[:, 0] = self.anchor_reduced
        W[:, 1:] = x.reshape(self.r, self.n - 1)
        return (self.C @ (W @ phi.T)).T  # (n_samples, d)

    def _sample_terms(self, q: np.ndarray) -> dict:
        """Affine balance-point pieces: zmp(f) = b + k f, with q-gradients."""
        model = self.p.model
        x_com, _ = com_position(model, q)
        x_h, z_h = hand_position(model, q)
        dxc = com_x_gradient(model, q)
        Jh = hand_jacobian(model, q)
        denom = self.mg - self.fh2
        b = (self.mg * x_com - self.fh2 * x_h) / denom
        k = z_h / denom
        db = (self.mg * dxc - self.fh2 * Jh[0]) / denom
        dk = Jh[1] / denom
        return {
            "q": q, "b": b, "k": k, "db": db, "dk": dk,
            "hand": np.array([x_h, z_h]), "Jh": Jh,
        }

    def _evaluate(self, x: np.ndarray) -> dict:
        key = x.tobytes()
        if key == self._cache_x:
            return self._cache
        q_cost = self._configs(x, self.phi_cost)
        q_con = self._configs(x, self.phi_con)
        self._cache = {
            "cost": [self._sample_terms(q) for q in q_cost],
            "con": [self._sample_terms(q) for q in q_con],
            "q_cost": q_cost,
            "q_con": q_con,
        }
        self._cache_x = key
        return self._cache

    def _dq_to_dx(self, dq: np.ndarray, phi: np.ndarray) -> np.ndarray:
        """Pull a gradient w.r.t. q back to the free weights."""
        return np.outer(self.C.T @ dq, phi[1:]).ravel()

    # objective -----------------------------------------------------------

    def objective(self, x: np.ndarray) -> float:
        ev = self._evaluate(x)
        total = 0.0
        for term, s in zip(ev["cost"], self.cost_s):
            if self.mode == "robust":
                zmps = term["b"] + self.forces * term["k"]
                hi = np.maximum(zmps - self.p.delta_margin[1], 0.0)
                lo = np.maximum(self.p.delta_margin[0] - zmps, 0.0)
                total += float(np.sum(hi**2) + np.sum(lo**2))
            else:
                total += float((term["b"] + s * self.p.f_max * term["k"]) ** 2)
        x0 = self.initial_point()
        total += _REG * float(np.sum((x - x0) ** 2))
        W = self.weights_from_free(x).reshape(self.r, self.n)
        total += self.p.solver.smoothness_weight * float(np.sum((W @ self._rough_K) * W))
        return total

    def objective_grad(self, x: np.ndarray) -> np.ndarray:
        ev = self._evaluate(x)
        grad = np.zeros(self.n_free)
        for term, s, phi in zip(ev["cost"], self.cost_s, self.phi_cost):
            if self.mode == "robust":
                zmps = term["b"] + self.forces * term["k"]
                hi = np.maximum(zmps - self.p.delta_margin[1], 0.0)
                lo = np.maximum(self.p.delta_margin[0] - zmps, 0.0)
                resid = 2.0 * (hi - lo)
                dq = float(np.sum(resid)) * term["db"] + float(resid @ self.forces) * term["dk"]
            else:
                z = term["b"] + s * self.p.f_max * term["k"]
                dq = 2.0 * z * (term["db"] + s * self.p.f_max * term["dk"])
            grad += self._dq_to_dx(dq, phi)
        grad += 2.0 * _REG * (x - self.initial_point())
        W = self.weights_from_free(x).reshape(self.r, self.n)
        grad += (
            2.0 * self.p.solver.smoothness_weight * (W @ self._rough_K)[:, 1:]
        ).ravel()
        return grad

    # constraints ----------------------------------------------------------

    def n_constraints(self) -> int:
        return len(self.con_s) * (2 + 2 * self.d + 1)

    def constraints(self, x: np.ndarray) -> np.ndarray:
        ev = self._evaluate(x)
        lo_m, hi_m = self.p.delta_margin
        lims = self.p.model.joint_limits
        cap2 = self.p.hand_displacement_cap**2
        rows = []
        for term, s in zip(ev["con"], self.con_s):
            zmp = term["b"] + s * self.p.f_max * term["k"]
            q = term["q"]
            dh = term["hand"] - self.hand0
            rows.append(np.concatenate([
                [zmp - lo_m, hi_m - zmp],
                q - lims[:, 0],
                lims[:, 1] - q,
                [cap2 - float(dh @ dh)],
            ]))
        return np.concatenate(rows)

    def constraints_jac(self, x: np.ndarray) -> np.ndarray:
        ev = self._evaluate(x)
        out = np.zeros((self.n_constraints(), self.n_free))
        row = 0
        for term, s, phi in zip(ev["con"], self.con_s, self.phi_con):
            f = s * self.p.f_max
            dzmp = term["db"] + f * term["dk"]
            out[row] = self._dq_to_dx(dzmp, phi)
            out[row + 1] = -out[row]
            row += 2
            # joint limits: dq_k/dW[a, b] = C[k, a] phi[b]
            block = np.einsum("ka,b->kab", self.C, phi[1:]).reshape(self.d, self.n_free)
            out[row : row + self.d] = block
            out[row + self.d : row + 2 * self.d] = -block
            row += 2 * self.d
            dh = term["hand"] - self.hand0
            out[row] = self._dq_to_dx(-2.0 * (dh @ term["Jh"]), phi)
            row += 1
        return out

    # residual summaries ----------------------------------------------------

    def violations(self, x: np.ndarray, s_values: np.ndarray) -> dict:
        manifold_w = self.weights_from_free(x)
        return evaluate_violations(
            self.p, manifold_w, s_values, hand0=self.hand0
        )


def evaluate_violations(
    problem: PlannerProblem, w: np.ndarray, s_values: np.ndarray, hand0=None
) -> dict:
    """Constraint residuals of a weight vector on arbitrary s locations.

    Returns per-family maxima plus the per-location margin overshoot so
    refinement can pick the worst offenders.
    """
    model = problem.model
    C = problem.C
    basis = BernsteinBasis(problem.degree)
    spec = ManifoldSpec(
        basis=basis, C=C, w=np.asarray(w, float), f_max=problem.f_max,
        delta_margin=problem.delta_margin,
        hand_displacement_cap=problem.hand_displacement_cap,
        model_fingerprint=model.fingerprint(),
    )
    if hand0 is None:
        hand0 = np.array(hand_position(model, problem.anchor_config))
    lo_m, hi_m = problem.delta_margin
    lims = model.joint_limits
    mg = _G_ABS * model.total_mass
    fh2 = problem.planning_f_h2

    zmp_viol = np.zeros(len(s_values))
    joint_viol = np.zeros(len(s_values))
    hand_viol = np.zeros(len(s_values))
    zmps = np.zeros(len(s_values))
    for i, s in enumerate(s_values):
        q = eval_config(spec, float(s))
        x_com, _ = com_position(model, q)
        x_h, z_h = hand_position(model, q)
        f = float(s) * problem.f_max
        zmp = (f * z_h - fh2 * x_h + mg * x_com) / (mg - fh2)
        zmps[i] = zmp
        zmp_viol[i] = max(lo_m - zmp, zmp - hi_m, 0.0)
        joint_viol[i] = max(
            float(np.max(lims[:, 0] - q)), float(np.max(q - lims[:, 1])), 0.0
        )
        hand_viol[i] = max(
            float(np.hypot(x_h - hand0[0], z_h - hand0[1])) - problem.hand_displacement_cap,
            0.0,
        )
    return {
        "zmp": zmps,
        "zmp_violation": zmp_viol,
        "joint_violation": joint_viol,
        "hand_violation": hand_viol,
        "max_zmp": float(np.max(zmp_viol)),
        "max_joint": float(np.max(joint_viol)),
        "max_hand": float(np.max(hand_viol)),
    }


def _fine_grid(problem: PlannerProblem, factor: int = 10) -> np.ndarray:
    return np.linspace(0.0, 1.0, factor * problem.D_samples)


def _run_slsqp(nlp: _ManifoldNLP, x0: np.ndarray, settings: SolverSettings):
    return minimize(
        nlp.objective,
        x0,
        jac=nlp.objective_grad,
        method="SLSQP",
        constraints=[{
            "type": "ineq",
            "fun": nlp.constraints,
            "jac": nlp.constraints_jac,
        }],
        options={"maxiter": settings.max_iterations, "ftol": settings.ftol},
    )


def solve_manifold(problem: PlannerProblem, mode: str = "robust") -> tuple[ManifoldSpec, SolveReport]:
    """Plan a manifold; returns the spec plus a residual report.

    The manifold is emitted even when the solve is infeasible, with the
    report's converged flag cleared, so callers can inspect how far from
    feasible the best attempt landed.
    """
    if mode not in ("robust", "standard"):
        raise PlannerError(f"mode must be 'robust' or 'standard', got {mode!r}")
    settings = problem.solver
    rng = np.random.default_rng(settings.seed)

    con_s = problem.s_grid.copy()
    nlp = _ManifoldNLP(problem, mode, con_s)
    starts = [nlp.initial_point()]
    for _ in range(settings.random_restarts):
        starts.append(
            nlp.initial_point() + settings.restart_scale * rng.standard_normal(nlp.n_free)
        )

    tol = {"zmp": settings.zmp_tolerance, "joint": settings.joint_tolerance}
    best = None
    total_iters = 0
    for idx, x0 in enumerate(starts):
        res = _run_slsqp(nlp, x0, settings)
        total_iters += int(res.nit)
        viol = nlp.violations(res.x, _fine_grid(problem))
        feasible = (
            viol["max_zmp"] <= tol["zmp"]
            and viol["max_hand"] <= tol["zmp"]
            and viol["max_joint"] <= tol["joint"]
        )
        worst = max(viol["max_zmp"], viol["max_hand"], viol["max_joint"])
        score = (not feasible, worst if not feasible else 0.0, res.fun, idx)
        if best is None or score < best[0]:
            best = (score, res.x, res)
        if feasible and idx == 0:
            break  # the anchored start already met every tolerance

    x = best[1]
    # exchange refinement: append worst fine-grid offenders as constraints
    for _ in range(settings.refine_rounds):
        fine = _fine_grid(problem)
        viol = nlp.violations(x, fine)
        total = np.maximum(
            np.maximum(viol["zmp_violation"], viol["hand_violation"]),
            viol["joint_violation"],
        )
        if (
            viol["max_zmp"] <= tol["zmp"]
            and viol["max_hand"] <= tol["zmp"]
            and viol["max_joint"] <= tol["joint"]
        ):
            break
        order = np.argsort(total)[::-1]
        added = []
        for j in order[: 4 * settings.refine_points_per_round]:
            s_new = fine[j]
            if total[j] <= 0.0:
                break
            if np.min(np.abs(con_s - s_new)) < 1e-9:
                continue
            added.append(s_new)
            if len(added) >= settings.refine_points_per_round:
                break
        if not added:
            break
        con_s = np.sort(np.concatenate([con_s, added]))
        nlp = _ManifoldNLP(problem, mode, con_s)
        res = _run_slsqp(nlp, x, settings)
        total_iters += int(res.nit)
        x = res.x

    w = nlp.weights_from_free(x)
    fine_viol = nlp.violations(x, _fine_grid(problem))
    converged = (
        fine_viol["max_zmp"] <= tol["zmp"]
        and fine_viol["max_hand"] <= tol["zmp"]
        and fine_viol["max_joint"] <= tol["joint"]
    )
    base_viol = nlp.violations(x, problem.s_grid)
    final_cost = _pure_cost(problem, mode, w)
    robust_total = sum(
        cost_robust(
            problem.model,
            eval_config(_spec_for(problem, w), float(s)),
            problem.f_max,
            problem.delta_margin,
            problem.force_penalty_samples,
        )
        for s in problem.s_grid
    )
    floor, attainable = robust_cost_floor(problem)
    max_violation = max(
        fine_viol["max_zmp"], fine_viol["max_hand"], fine_viol["max_joint"]
    )
    report = SolveReport(
        mode=mode,
        converged=bool(converged),
        iterations=total_iters,
        final_cost=float(final_cost),
        max_violation=float(max_violation),
        max_zmp_violation=fine_viol["max_zmp"],
        max_joint_violation=fine_viol["max_joint"],
        max_hand_violation=fine_viol["max_hand"],
        robust_cost=float(robust_total),
        robust_cost_floor=float(floor),
        zero_cost_attainable=attainable,
        s_grid=[float(s) for s in problem.s_grid],
        zmp_trace=[
            (float(s), float(s * problem.f_max), float(z))
            for s, z in zip(problem.s_grid, base_viol["zmp"])
        ],
        message="" if converged else (
            "constraint residuals above tolerance after refinement; "
            "the problem is likely infeasible as configured"
        ),
    )
    manifold = _spec_for(problem, w, report)
    return manifold, report


def _pure_cost(problem: PlannerProblem, mode: str, w: np.ndarray) -> float:
    """The mode's summed grid cost, without tie-breaking terms."""
    spec = _spec_for(problem, w)
    total = 0.0
    for s in problem.s_grid:
        q = eval_config(spec, float(s))
        if mode == "robust":
            total += cost_robust(
                problem.model, q, problem.f_max, problem.delta_margin,
                problem.force_penalty_samples,
            )
        else:
            total += cost_standard(problem.model, q, float(s) * problem.f_max)
    return float(total)


def _spec_for(problem: PlannerProblem, w: np.ndarray, report: SolveReport | None = None) -> ManifoldSpec:
    summary = {}
    if report is not None:
        summary = {
            "iterations": report.iterations,
            "final_cost": report.final_cost,
            "max_violation": report.max_violation,
        }
    return ManifoldSpec(
        basis=BernsteinBasis(problem.degree),
        C=problem.C,
        w=np.asarray(w, float),
        f_max=problem.f_max,
        delta_margin=problem.delta_margin,
        hand_displacement_cap=problem.hand_displacement_cap,
        model_fingerprint=problem.model.fingerprint(),
        solver_report=summary,
    )


def check_manifold(
    manifold: ManifoldSpec,
    problem: PlannerProblem,
    grid_factor: int = 10,
    override_fingerprint: bool = False,
) -> SolveReport:
    """Re-validate a (possibly deserialized) manifold against a model.

    Pure evaluation on a grid at least grid_factor times denser than the
    planning grid; no solving.
    """
    if manifold.model_fingerprint != problem.model.fingerprint() and not override_fingerprint:
        raise PlannerError(
            "manifold was planned for a different model "
            f"(fingerprint {manifold.model_fingerprint}); pass "
            "override_fingerprint=True to check anyway"
        )
    if manifold.d != problem.model.n_joints:
        raise PlannerError("manifold dimension does not match the model")
    fine = _fine_grid(problem, grid_factor)
    viol = evaluate_violations(problem, manifold.w, fine)
    base = evaluate_violations(problem, manifold.w, problem.s_grid)
    robust_total = sum(
        cost_robust(
            problem.model,
            eval_config(manifold, float(s)),
            problem.f_max,
            problem.delta_margin,
            problem.force_penalty_samples,
        )
        for s in problem.s_grid
    )
    floor, attainable = robust_cost_floor(problem)
    settings = problem.solver
    converged = (
        viol["max_zmp"] <= settings.zmp_tolerance
        and viol["max_hand"] <= settings.zmp_tolerance
        and viol["max_joint"] <= settings.joint_tolerance
    )
    return SolveReport(
        mode="check",
        converged=bool(converged),
        iterations=0,
        final_cost=float(robust_total),
        max_violation=float(max(viol["max_zmp"], viol["max_hand"], viol["max_joint"])),
        max_zmp_violation=viol["max_zmp"],
        max_joint_violation=viol["max_joint"],
        max_hand_violation=viol["max_hand"],
        robust_cost=float(robust_total),
        robust_cost_floor=float(floor),
        zero_cost_attainable=attainable,
        s_grid=[float(s) for s in problem.s_grid],
        zmp_trace=[
            (float(s), float(s * problem.f_max), float(z))
            for s, z in zip(problem.s_grid, base["zmp"])
        ],
    )


# -- per-force baseline ----------------------------------------------------


@dataclass
class BaselineResult:
    forces: np.ndarray
    configs: np.ndarray  # (n_forces, d)
    costs: np.ndarray
    feasible: np.ndarray

    def max_adjacent_jump(self) -> float:
        if len(self.configs) < 2:
            return 0.0
        return float(np.max(np.abs(np.diff(self.configs, axis=0))))


def solve_per_force_baseline(problem: PlannerProblem, force_grid) -> BaselineResult:
    """Independent single-configuration solves, one per force value.

    Mirrors planning without the functional representation: each force
    gets its own standard-cost solve started cold from the anchor (plus
    seeded random restarts). Adjacent solutions are free to land in
    different basins, which is exactly the discontinuity the manifold
    formulation removes.
    """
    forces = np.asarray(force_grid, dtype=float)
    settings = problem.solver
    model = problem.model
    C = problem.C.entries
    d, r = C.shape
    a0 = problem.reduced_anchor()
    hand0 = np.array(hand_position(model, problem.anchor_config))
    mg = _G_ABS * model.total_mass
    fh2 = problem.planning_f_h2
    lims = model.joint_limits
    lo_m, hi_m = problem.delta_margin
    cap2 = problem.hand_displacement_cap**2

    rng = np.random.default_rng(settings.seed)
    starts = [a0] + [
        a0 + settings.restart_scale * rng.standard_normal((len(forces), r))
        for _ in range(max(settings.random_restarts, 1))
    ]

    def solve_one(f: float, x0: np.ndarray):
        def zmp_of(qr):
            q = C @ qr
            x_com, _ = com_position(model, q)
            x_h, z_h = hand_position(model, q)
            return (f * z_h - fh2 * x_h + mg * x_com) / (mg - fh2)

        def fun(qr):
            return zmp_of(qr) ** 2

        def cons(qr):
            q = C @ qr
            x_h, z_h = hand_position(model, q)
            z = zmp_of(qr)
            dh2 = (x_h - hand0[0]) ** 2 + (z_h - hand0[1]) ** 2
            return np.concatenate([
                [z - lo_m, hi_m - z],
                q - lims[:, 0],
                lims[:, 1] - q,
                [cap2 - dh2],
            ])

        res = minimize(
            fun, x0, method="SLSQP",
            constraints=[{"type": "ineq", "fun": cons}],
            options={"maxiter": settings.max_iterations, "ftol": settings.ftol},
        )
        worst = -float(np.min(cons(res.x))) if len(res.x) else np.inf
        feas = worst <= max(settings.zmp_tolerance, settings.joint_tolerance)
        return res.x, float(res.fun), feas

    configs = np.zeros((len(forces), d))
    costs = np.zeros(len(forces))
    feasible = np.zeros(len(forces), dtype=bool)
    for i, f in enumerate(forces):
        candidates = []
        for k, start in enumerate(starts):
            x0 = start if start.ndim == 1 else start[i]
            qr, cost, feas = solve_one(float(f), np.asarray(x0, float))
            candidates.append((not feas, cost, k, qr))
        candidates.sort(key=lambda c: c[:3])
        infeas, cost, _, qr = candidates[0]
        configs[i] = C @ qr
        costs[i] = cost
        feasible[i] = not infeas
    return BaselineResult(forces=forces, configs=configs, costs=costs, feasible=feasible)
