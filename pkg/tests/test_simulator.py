import numpy as np
import pytest

from stancepath.basis import BernsteinBasis, ManifoldSpec, constant_weights
from stancepath.model import CoordinationMatrix, LinkSpec, RobotModel, link_com_kinematics
from stancepath.simulator import (
    ChainDynamics,
    EpisodeResult,
    ForceProfile,
    SimSettings,
    SimState,
    SimulationError,
    TickSession,
    dynamics_step,
    episode_csv,
    force_profile_eval,
    run_episode,
)
from stancepath.stability import HandWrench, zmp_static_full


def single_link(length=1.0, mass=5.0, com=0.6, inertia=None, q0=np.pi):
    inertia = mass * length**2 / 12 if inertia is None else inertia
    return RobotModel(
        links=(LinkSpec(length, mass, com, inertia),),
        foot_extent=(-0.1, 0.1),
        default_config=np.array([q0]),
        joint_limits=np.array([[-4 * np.pi, 4 * np.pi]]),
        hand_link_index=0,
    )


class TestForceProfile:
    def test_sinusoid_peak_at_rise_time(self):
        p = ForceProfile(kind="sinusoid", M=150.0, h=2.0)
        assert force_profile_eval(p, 2.0) == pytest.approx(150.0)

    def test_sinusoid_zero_at_ends(self):
        p = ForceProfile(kind="sinusoid", M=150.0, h=2.0)
        assert force_profile_eval(p, 0.0) == 0.0
        assert force_profile_eval(p, 4.0) == pytest.approx(0.0, abs=1e-12)
        assert force_profile_eval(p, 5.0) == 0.0

    def test_sinusoid_half_rise_value(self):
        p = ForceProfile(kind="sinusoid", M=100.0, h=1.0)
        assert force_profile_eval(p, 0.5) == pytest.approx(100.0 * np.sin(np.pi / 4))

    def test_recorded_linear_interpolation(self):
        samples = np.array([[0.0, 0.0], [1.0, 100.0], [3.0, 0.0]])
        p = ForceProfile(kind="recorded", samples=samples)
        assert force_profile_eval(p, 0.5) == pytest.approx(50.0)
        assert force_profile_eval(p, 2.0) == pytest.approx(50.0)
        assert force_profile_eval(p, 0.25) == pytest.approx(25.0)

    def test_piecewise_zero_order_hold(self):
        samples = np.array([[0.0, 10.0], [1.0, 30.0]])
        p = ForceProfile(kind="piecewise", samples=samples)
        assert force_profile_eval(p, 0.0) == 10.0
        assert force_profile_eval(p, 0.999) == 10.0
        assert force_profile_eval(p, 1.0) == 30.0
        assert force_profile_eval(p, 5.0) == 30.0

    def test_negative_time_rejected(self):
        p = ForceProfile(kind="sinusoid", M=1.0, h=1.0)
        with pytest.raises(SimulationError):
            force_profile_eval(p, -0.1)

    def test_validation(self):
        with pytest.raises(SimulationError):
            ForceProfile(kind="sinusoid", M=-1.0, h=1.0)
        with pytest.raises(SimulationError):
            ForceProfile(kind="sinusoid", M=1.0, h=0.0)
        with pytest.raises(SimulationError):
            ForceProfile(kind="recorded")
        with pytest.raises(SimulationError):
            ForceProfile(kind="triangle")


class TestDynamics:
    def test_pendulum_period_matches_closed_form(self):
        # small oscillation of a hanging link about the stable equilibrium
        m, L, lc = 5.0, 1.0, 0.6
        model = single_link(L, m, lc)
        inertia_pivot = model.links[0].inertia_zz + m * lc**2
        expected = 2 * np.pi * np.sqrt(inertia_pivot / (m * 9.81 * lc))
        settings = SimSettings(dt=1e-3)
        engine = ChainDynamics(model, settings)
        amp = 0.05
        state = SimState(0.0, np.array([np.pi + amp]), np.zeros(1), HandWrench(), 0.0, True)
        crossings = []
        prev = amp
        for _ in range(int(3 * expected / 1e-3)):
            state = dynamics_step(
                model, state, state.q, HandWrench(), 1e-3,
                settings=settings, engine=engine, apply_pd=False,
            )
            cur = state.q[0] - np.pi
            if prev < 0 <= cur:
                crossings.append(state.t - 1e-3 * cur / (cur - prev))
            prev = cur
        period = float(np.mean(np.diff(crossings)))
        assert abs(period - expected) / expected < 0.01

    def test_equilibrium_without_gravity_stays_fixed(self):
        # gravity-compensated PD toward the current pose holds it exactly
        model = single_link(q0=0.3)
        settings = SimSettings()
        engine = ChainDynamics(model, settings)
        q0 = model.default_config.copy()
        state = SimState(0.0, q0.copy(), np.zeros(1), HandWrench(), 0.0, True)
        for _ in range(200):
            state = dynamics_step(
                model, state, q0, HandWrench(), 1e-3, settings=settings, engine=engine
            )
        np.testing.assert_allclose(state.q, q0, atol=1e-9)
        np.testing.assert_allclose(state.qdot, np.zeros(1), atol=1e-9)

    def test_energy_conservation_two_link_swing(self):
        links = (
            LinkSpec(0.8, 3.0, 0.4, 3 * 0.64 / 12),
            LinkSpec(0.6, 2.0, 0.3, 2 * 0.36 / 12),
        )
        model = RobotModel(
            links=links, foot_extent=(-0.1, 0.1),
            default_config=np.array([np.pi, 0.0]),
            joint_limits=np.array([[0.0, 2 * np.pi], [-np.pi, np.pi]]),
            hand_link_index=1,
        )
        masses = np.array([3.0, 2.0])
        inertias = np.array([l.inertia_zz for l in links])

        def energy(q, qd):
            pts, vel, _, _ = link_com_kinematics(model, q, qd, np.zeros(2))
            kin = 0.5 * float(masses @ (vel**2).sum(axis=1))
            kin += 0.5 * float(inertias @ np.cumsum(qd) ** 2)
            pot = 9.81 * float(masses @ pts[:, 1])
            return kin + pot

        settings = SimSettings(dt=1e-3)
        engine = ChainDynamics(model, settings)
        q = np.array([np.pi, 0.0])
        qd = np.array([0.4, -0.3])
        e_start = energy(q, qd)
        e_rest = energy(np.array([np.pi, 0.0]), np.zeros(2))
        scale = e_start - e_rest  # energy of the motion itself
        state = SimState(0.0, q, qd, HandWrench(), 0.0, True)
        worst = 0.0
        for _ in range(2000):
            state = dynamics_step(
                model, state, state.q, HandWrench(), 1e-3,
                settings=settings, engine=engine, apply_pd=False,
            )
            worst = max(worst, abs(energy(state.q, state.qdot) - e_start))
        assert worst / scale < 0.005, f"energy drift {worst / scale:.2%}"

    def test_settled_dynamic_zmp_matches_static(self):
        from stancepath import default_model

        model = default_model()
        settings = SimSettings()
        engine = ChainDynamics(model, settings)
        q0 = model.default_config.copy()
        wrench = HandWrench(60.0, 0.0)
        state = SimState(0.0, q0.copy(), np.zeros(5), HandWrench(), 0.0, True)
        for _ in range(3000):  # hold target under a constant pull until settled
            state = dynamics_step(
                model, state, q0, wrench, 1e-3, settings=settings, engine=engine
            )
        static = zmp_static_full(model, state.q, wrench)
        assert abs(state.zmp - static) < 0.002

    def test_dt_bounds_enforced(self):
        model = single_link()
        state = SimState(0.0, model.default_config.copy(), np.zeros(1), HandWrench(), 0.0, True)
        with pytest.raises(SimulationError):
            dynamics_step(model, state, state.q, HandWrench(), 0.02)
        with pytest.raises(SimulationError):
            SimSettings(dt=0.05)


def constant_manifold(model, f_max=200.0):
    C = CoordinationMatrix.identity(model.n_joints)
    basis = BernsteinBasis(3)
    w = constant_weights(C, basis, model.default_config)
    return ManifoldSpec(
        basis=basis, C=C, w=w, f_max=f_max,
        delta_margin=(-0.05, 0.05), hand_displacement_cap=0.1,
        model_fingerprint=model.fingerprint(),
    )


class TestEpisodes:
    def test_zero_force_episode_succeeds_from_anchor(self):
        from stancepath import default_model

        model = default_model()
        manifold = constant_manifold(model)
        profile = ForceProfile(kind="sinusoid", M=0.0, h=1.0, duration=2.0)
        result = run_episode(model, manifold, profile)
        assert result.success
        assert result.failure_reason is None
        assert result.max_abs_zmp < 0.05 + 0.01

    def test_overwhelming_force_fails_with_support_exceeded(self):
        from stancepath import default_model

        model = default_model()
        manifold = constant_manifold(model, f_max=200.0)
        profile = ForceProfile(kind="sinusoid", M=2000.0, h=1.0)
        result = run_episode(model, manifold, profile)
        assert not result.success
        assert result.failure_reason == "zmp_exceeded_support"
        assert result.failure_time is not None

    def test_fingerprint_mismatch_rejected(self):
        from stancepath import default_model

        model = default_model()
        manifold = constant_manifold(model)
        data = manifold.to_dict()
        data["model_fingerprint"] = "0" * 16
        stale = ManifoldSpec.from_dict(data)
        with pytest.raises(SimulationError, match="different model"):
            run_episode(model, stale, ForceProfile(kind="sinusoid", M=0.0, h=1.0))
        run_episode(
            model, stale,
            ForceProfile(kind="sinusoid", M=0.0, h=1.0, duration=0.5),
            check_fingerprint=False,
        )

    def test_determinism_bitwise(self):
        from stancepath import default_model

        model = default_model()
        manifold = constant_manifold(model)
        profile = ForceProfile(kind="sinusoid", M=120.0, h=1.0, duration=3.0)
        r1 = run_episode(model, manifold, profile)
        r2 = run_episode(model, manifold, profile)
        assert episode_csv(r1) == episode_csv(r2)
        np.testing.assert_array_equal(r1.q, r2.q)

    def test_commanded_targets_stay_on_manifold(self):
        from stancepath import default_model
        from stancepath.basis import eval_config

        model = default_model()
        manifold = constant_manifold(model)
        session = TickSession(model, manifold)
        for k in range(40):
            rec = session.tick(50.0)
            np.testing.assert_allclose(
                eval_config(manifold, rec["s"]),
                session._last_target,
                atol=1e-12,
            )

    def test_csv_columns(self):
        from stancepath import default_model

        model = default_model()
        manifold = constant_manifold(model)
        res = run_episode(
            model, manifold, ForceProfile(kind="sinusoid", M=0.0, h=1.0, duration=0.5)
        )
        header = episode_csv(res).splitlines()[0]
        assert header == "t,f_h1,s,q0,q1,q2,q3,q4,x_zmp,inside_margin,inside_support"

    def test_sticky_failure_requires_reset(self):
        from stancepath import default_model

        model = default_model()
        manifold = constant_manifold(model)
        session = TickSession(model, manifold)
        while session.failure is None:
            session.tick(1500.0)
        with pytest.raises(SimulationError, match="reset"):
            session.tick(0.0)
        session.reset()
        assert session.failure is None
