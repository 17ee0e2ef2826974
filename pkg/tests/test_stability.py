import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stancepath.model import GRAVITY, LinkSpec, RobotModel, com_position, hand_position
from stancepath.stability import (
    HandWrench,
    StabilityError,
    support_check,
    zmp_dynamic,
    zmp_static_full,
    zmp_static_simplified,
)


def chain(links, hand_index=None, limits=(-2 * np.pi, 2 * np.pi)):
    n = len(links)
    return RobotModel(
        links=tuple(links),
        foot_extent=(-0.1, 0.1),
        default_config=np.zeros(n),
        joint_limits=np.tile(limits, (n, 1)),
        hand_link_index=n - 1 if hand_index is None else hand_index,
    )


def lever_model(mass=100.0, com_x=0.0, hand=(0.2, 1.0)):
    """Single-link model with prescribed CoM abscissa and hand point.

    The link points at the hand; the CoM sits com_offset along it, so
    com_x = offset * hand_x / length.
    """
    length = float(np.hypot(*hand))
    if com_x == 0.0:
        offset = 0.0
    else:
        offset = com_x * length / hand[0]
    model = chain([LinkSpec(length=length, mass=mass, com_offset=offset)])
    q = np.array([np.arctan2(-hand[0], hand[1])])
    return model, q


class TestStaticFull:
    def test_zero_force_returns_com(self):
        model, q = lever_model(com_x=0.037)
        x_com, _ = com_position(model, q)
        assert zmp_static_full(model, q, HandWrench(0.0, 0.0)) == x_com

    def test_direct_substitution_horizontal_pull(self):
        # m = 100 kg, x_com = 0, hand = (0.2, 1.0), f_h1 = 100 N
        model, q = lever_model(mass=100.0, com_x=0.0, hand=(0.2, 1.0))
        expected = (100.0 * 1.0) / (100.0 * 9.81)
        assert zmp_static_full(model, q, HandWrench(100.0, 0.0)) == pytest.approx(
            expected, abs=1e-9
        )

    def test_direct_substitution_with_vertical_component(self):
        model, q = lever_model(mass=100.0, com_x=0.0, hand=(0.2, 1.0))
        expected = (100.0 * 1.0 - 50.0 * 0.2) / (100.0 * 9.81 - 50.0)
        assert zmp_static_full(model, q, HandWrench(100.0, 50.0)) == pytest.approx(
            expected, abs=1e-9
        )

    def test_direct_substitution_third_case(self):
        model, q = lever_model(mass=80.0, com_x=0.05, hand=(0.3, 1.2))
        x_com, _ = com_position(model, q)
        x_h1, x_h2 = hand_position(model, q)
        f1, f2 = 150.0, -30.0
        expected = (f1 * x_h2 - f2 * x_h1 - 80.0 * GRAVITY * x_com) / (-80.0 * GRAVITY - f2)
        assert zmp_static_full(model, q, HandWrench(f1, f2)) == pytest.approx(
            expected, abs=1e-9
        )

    def test_unsupported_lift_raises(self):
        model, q = lever_model(mass=10.0)
        with pytest.raises(StabilityError, match="lift"):
            zmp_static_full(model, q, HandWrench(0.0, 10.0 * 9.81))


class TestStaticSimplified:
    def test_zero_force_returns_com(self):
        model, q = lever_model(com_x=-0.02, hand=(-0.2, 1.0))
        x_com, _ = com_position(model, q)
        assert zmp_static_simplified(model, q, 0.0) == pytest.approx(x_com, abs=1e-15)

    def test_direct_substitution(self):
        # m = 100, x_com = 0.02, x_h2 = 1.0, f = 200 -> 0.02 + 200 / 981
        model, q = lever_model(mass=100.0, com_x=0.02, hand=(0.2, 1.0))
        expected = 0.02 + 200.0 / 981.0
        assert zmp_static_simplified(model, q, 200.0) == pytest.approx(expected, abs=1e-9)

    def test_equals_full_when_vertical_force_and_lever_vanish(self):
        model, q = lever_model(mass=60.0, com_x=0.0, hand=(0.0, 1.3))
        for f in [0.0, 50.0, 200.0]:
            full = zmp_static_full(model, q, HandWrench(f, 0.0))
            simp = zmp_static_simplified(model, q, f)
            assert full == pytest.approx(simp, abs=1e-15)

    @given(f1=st.floats(0, 200), f2=st.floats(0, 150))
    @settings(max_examples=50, deadline=None)
    def test_monotone_increasing_in_force_for_raised_hand(self, f1, f2):
        model, q = lever_model(mass=95.0, com_x=0.04, hand=(0.3, 0.9))
        lo, hi = sorted([f1, f2])
        assert zmp_static_simplified(model, q, hi) >= zmp_static_simplified(model, q, lo)


class TestDynamic:
    def test_static_reduction(self):
        model, q = lever_model(mass=80.0, com_x=0.03, hand=(0.25, 1.1))
        zero = np.zeros(1)
        wrench = HandWrench(120.0, 20.0)
        dyn = zmp_dynamic(model, q, zero, zero, wrench)
        stat = zmp_static_full(model, q, wrench)
        assert dyn == pytest.approx(stat, abs=1e-9)

    def test_inverted_pendulum_identity(self):
        # point mass at height h accelerating horizontally by a:
        # x_zmp = x_com - a * h / 9.81
        h, m, a = 0.9, 70.0, 1.4
        model = chain([LinkSpec(length=1.0, mass=m, com_offset=h, inertia_zz=0.0)])
        q = np.zeros(1)
        # theta = 0: x_ddot = -h * theta_ddot -> theta_ddot = -a / h
        qddot = np.array([-a / h])
        z = zmp_dynamic(model, q, np.zeros(1), qddot, HandWrench(0.0, 0.0))
        assert z == pytest.approx(-a * h / 9.81, rel=1e-12)

    def test_rotational_inertia_term_contributes(self):
        h, m = 0.9, 70.0
        base = chain([LinkSpec(1.0, m, h, inertia_zz=0.0)])
        spinning = chain([LinkSpec(1.0, m, h, inertia_zz=2.5)])
        qddot = np.array([-1.0])
        z0 = zmp_dynamic(base, np.zeros(1), np.zeros(1), qddot, HandWrench())
        z1 = zmp_dynamic(spinning, np.zeros(1), np.zeros(1), qddot, HandWrench())
        expected_shift = 2.5 * (-1.0) / (m * 9.81)
        assert z1 - z0 == pytest.approx(expected_shift, rel=1e-12)

    def test_matches_momentum_rate_oracle(self):
        from stancepath import default_model
        from stancepath.model import forward_kinematics, com_lever_matrix

        model = default_model()
        amp = np.array([0.15, 0.3, -0.25, 0.2, 0.35])
        omega = np.array([2.0, 1.3, 1.7, 2.4, 0.9])
        phase = np.array([0.1, 0.7, -0.4, 1.2, 0.0])
        q0 = model.default_config

        def q_of(t):
            return q0 + amp * np.sin(omega * t + phase)

        def qd_of(t):
            return amp * omega * np.cos(omega * t + phase)

        def qdd_of(t):
            return -amp * omega**2 * np.sin(omega * t + phase)

        masses = np.array([l.mass for l in model.links])
        inertias = np.array([l.inertia_zz for l in model.links])
        A = com_lever_matrix(model)

        def com_points(t):
            theta = np.cumsum(q_of(t))
            return A @ np.stack([-np.sin(theta), np.cos(theta)], axis=-1)

        def momenta(t, dt=1e-5):
            # velocities from centered position differences only
            pts = com_points(t)
            vel = (com_points(t + dt) - com_points(t - dt)) / (2 * dt)
            theta_dot = (np.cumsum(q_of(t + dt)) - np.cumsum(q_of(t - dt))) / (2 * dt)
            ang = float(
                masses @ (pts[:, 0] * vel[:, 1] - pts[:, 1] * vel[:, 0])
            ) + float(inertias @ theta_dot)
            lin = masses @ vel
            return ang, lin

        t0 = 0.8
        wrench = HandWrench(90.0, 15.0)
        dt = 1e-4
        ang_p, lin_p = momenta(t0 + dt)
        ang_m, lin_m = momenta(t0 - dt)
        ldot = (ang_p - ang_m) / (2 * dt)
        pdot = (lin_p - lin_m) / (2 * dt)
        q = q_of(t0)
        x_h1, x_h2 = hand_position(model, q)
        pts = com_points(t0)
        f_c2 = pdot[1] + model.total_mass * 9.81 - wrench.f_h2
        oracle = (
            ldot + 9.81 * float(masses @ pts[:, 0]) - x_h1 * wrench.f_h2 + x_h2 * wrench.f_h1
        ) / f_c2
        z = zmp_dynamic(model, q, qd_of(t0), qdd_of(t0), wrench)
        assert z == pytest.approx(oracle, rel=1e-5)

    def test_contact_loss(self):
        model = chain([LinkSpec(1.0, 5.0, 0.5)])
        # free fall: links accelerating down at g cancels the contact force
        with pytest.raises(StabilityError, match="contact"):
            zmp_dynamic(model, np.zeros(1), np.zeros(1), np.zeros(1), HandWrench(0.0, 5.0 * 9.81))


class TestSupportCheck:
    def test_centered_inside_margin(self):
        res = support_check(0.0, (-0.05, 0.05), (-0.10, 0.10))
        assert res.inside_margin and res.inside_support

    def test_outside_margin_inside_support(self):
        res = support_check(0.08, (-0.05, 0.05), (-0.10, 0.10))
        assert not res.inside_margin and res.inside_support

    def test_outside_both(self):
        res = support_check(0.12, (-0.05, 0.05), (-0.10, 0.10))
        assert not res.inside_margin and not res.inside_support

    def test_margin_wider_than_support_rejected(self):
        with pytest.raises(StabilityError):
            support_check(0.0, (-0.2, 0.2), (-0.1, 0.1))

    def test_margin_inside_implies_support_inside(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            x = rng.uniform(-0.2, 0.2)
            res = support_check(x, (-0.05, 0.05), (-0.10, 0.10))
            if res.inside_margin:
                assert res.inside_support


class TestHandWrench:
    def test_rejects_non_finite(self):
        with pytest.raises(StabilityError):
            HandWrench(np.nan, 0.0)
        with pytest.raises(StabilityError):
            HandWrench(0.0, np.inf)

    def test_sanity_bound(self):
        with pytest.raises(StabilityError):
            HandWrench(2500.0, 0.0)
        HandWrench(1999.0, 0.0)


class TestSimplificationEnvelope:
    def test_discrepancy_small_under_task_conditions(self):
        """Full vs simplified stay within 2 cm over the interaction envelope.

        States are drawn to respect the conditions under which the
        simplification is derived: the vertical hand force is a small
        fraction of body weight and much smaller than the pull, and the
        horizontal hand lever stays below half a meter.
        """
        from stancepath import default_model

        model = default_model()
        rng = np.random.default_rng(42)
        mg = model.total_mass * 9.81
        lims = model.joint_limits
        count, worst = 0, 0.0
        while count < 1000:
            q = rng.uniform(lims[:, 0], lims[:, 1])
            x_h1, x_h2 = hand_position(model, q)
            if abs(x_h1) > 0.5:
                continue
            f1 = rng.uniform(0.0, 200.0)
            f2 = rng.uniform(-0.02 * mg, 0.02 * mg)
            assert abs(f2) <= 0.1 * mg and abs(x_h1) <= 0.5
            full = zmp_static_full(model, q, HandWrench(f1, f2))
            simp = zmp_static_simplified(model, q, f1)
            worst = max(worst, abs(full - simp))
            count += 1
        assert worst < 0.02, f"worst discrepancy {worst:.4f} m"
