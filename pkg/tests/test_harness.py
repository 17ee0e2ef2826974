import numpy as np
import pytest

from stancepath.basis import BernsteinBasis, ManifoldSpec, constant_weights
from stancepath.harness import (
    HarnessError,
    SweepConfig,
    SweepResult,
    compare_smoothness,
    render_success_grid,
    run_sweep,
)
from stancepath.model import CoordinationMatrix
from stancepath.planner import PlannerProblem, SolverSettings, solve_manifold
from stancepath.simulator import SimSettings


@pytest.fixture(scope="module")
def model():
    from stancepath import default_model

    return default_model()


@pytest.fixture(scope="module")
def manifolds(model):
    prob = PlannerProblem(model=model)
    robust, rr = solve_manifold(prob, "robust")
    standard, rs = solve_manifold(prob, "standard")
    assert rr.converged and rs.converged
    return {"robust": robust, "standard": standard}


def constant_manifold(model):
    C = CoordinationMatrix.identity(model.n_joints)
    basis = BernsteinBasis(3)
    return ManifoldSpec(
        basis=basis, C=C,
        w=constant_weights(C, basis, model.default_config),
        f_max=200.0, delta_margin=(-0.05, 0.05), hand_displacement_cap=0.1,
        model_fingerprint=model.fingerprint(),
    )


class TestSweepConfig:
    def test_defaults_match_grid(self):
        cfg = SweepConfig()
        assert cfg.M_values == (100.0, 125.0, 150.0, 175.0, 200.0)
        assert cfg.h_values == (1.0, 2.0, 3.0, 4.0)
        assert cfg.modes == ("robust", "standard")

    def test_rejects_empty_and_bad_values(self):
        with pytest.raises(HarnessError):
            SweepConfig(M_values=())
        with pytest.raises(HarnessError):
            SweepConfig(h_values=(0.0,))
        with pytest.raises(HarnessError):
            SweepConfig(M_values=(-5.0,))


class TestSweep:
    def test_single_cell_sweep(self, model):
        man = constant_manifold(model)
        cfg = SweepConfig(M_values=(10.0,), h_values=(1.0,), modes=("robust",))
        result = run_sweep(model, {"robust": man}, cfg)
        assert len(result.cells) == 1
        csv = result.to_csv()
        assert csv.splitlines()[0] == "mode,M,h,success,failure_reason,max_abs_zmp"
        assert len(csv.splitlines()) == 2

    def test_cell_count_and_matrix_shape(self, model):
        man = constant_manifold(model)
        cfg = SweepConfig(M_values=(10.0, 20.0), h_values=(1.0, 2.0, 3.0), modes=("robust",))
        result = run_sweep(model, {"robust": man}, cfg)
        assert len(result.cells) == 2 * 3
        assert result.success_matrix("robust").shape == (3, 2)

    def test_missing_manifold_rejected(self, model):
        man = constant_manifold(model)
        with pytest.raises(HarnessError, match="standard"):
            run_sweep(model, {"robust": man}, SweepConfig(M_values=(10.0,), h_values=(1.0,)))

    def test_deterministic_csv_bytes(self, model):
        man = constant_manifold(model)
        cfg = SweepConfig(M_values=(10.0, 150.0), h_values=(1.0,), modes=("robust",))
        r1 = run_sweep(model, {"robust": man}, cfg)
        r2 = run_sweep(model, {"robust": man}, cfg)
        assert r1.to_csv() == r2.to_csv()

    def test_worker_pool_matches_serial(self, model):
        man = constant_manifold(model)
        cfg = SweepConfig(M_values=(10.0, 120.0), h_values=(1.0, 2.0), modes=("robust",))
        serial = run_sweep(model, {"robust": man}, cfg, workers=1)
        pooled = run_sweep(model, {"robust": man}, cfg, workers=2)
        assert serial.to_csv() == pooled.to_csv()


class TestSvg:
    def test_grid_renders_every_cell(self, model):
        man = constant_manifold(model)
        cfg = SweepConfig(M_values=(10.0, 150.0), h_values=(1.0, 2.0), modes=("robust",))
        result = run_sweep(model, {"robust": man}, cfg)
        svg = render_success_grid(result)
        assert svg.count("<rect") == 4
        assert svg.startswith("<svg")
        assert "#2ca02c" in svg or "#7f7f7f" in svg

    def test_colors_follow_verdicts(self, model):
        man = constant_manifold(model)
        cfg = SweepConfig(M_values=(10.0, 2000.0), h_values=(1.0,), modes=("robust",))
        result = run_sweep(model, {"robust": man}, cfg)
        svg = render_success_grid(result)
        assert "#2ca02c" in svg  # the gentle cell passes
        assert "#7f7f7f" in svg  # the absurd force fails


class TestSmoothness:
    def test_manifold_smoother_than_baseline(self, model, manifolds):
        prob = PlannerProblem(model=model)
        comparison = compare_smoothness(prob, manifolds["robust"])
        assert comparison.manifold_max_jump < comparison.baseline_max_jump
        assert comparison.baseline_max_jump > 0.05

    def test_zero_force_problem_gives_constant_traces(self, model):
        prob = PlannerProblem(
            model=model, degree=4, D_samples=6, f_max=0.0,
            solver=SolverSettings(random_restarts=1),
        )
        manifold, report = solve_manifold(prob, "robust")
        assert report.converged
        comparison = compare_smoothness(prob, manifold, force_grid=np.zeros(4))
        assert comparison.manifold_max_jump < 1e-6
        assert comparison.baseline_max_jump < 1e-6

    def test_csv_contains_both_methods(self, model, manifolds):
        prob = PlannerProblem(model=model)
        comparison = compare_smoothness(prob, manifolds["robust"], force_grid=[0.0, 100.0])
        csv = comparison.to_csv()
        assert "manifold" in csv and "per_force" in csv
        assert csv.splitlines()[0] == "force,method,q0,q1,q2,q3,q4"
