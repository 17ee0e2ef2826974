"""Tour of the planar chain model and the static balance formulas.

The packaged robot is a five-joint sagittal chain (ankle, knee, hip,
shoulder, elbow) massing 95 kg. Its ready pose holds the hands forward at
grab height with the body mass leaning slightly behind the ankle, which
buys headroom against the forward pull it is about to receive.
"""

import numpy as np

from stancepath import default_model
from stancepath.model import com_position, forward_kinematics, hand_position
from stancepath.stability import (
    HandWrench,
    support_check,
    zmp_static_full,
    zmp_static_simplified,
)

model = default_model()
q = model.default_config

print(f"links: {model.n_joints}, total mass {model.total_mass:.1f} kg")
print("joint frame positions (x, z) in the ready pose:")
for i, (x, z) in enumerate(forward_kinematics(model, q)):
    print(f"  link {i}: ({x:+.3f}, {z:+.3f}) m")

x_com, z_com = com_position(model, q)
x_h1, x_h2 = hand_position(model, q)
print(f"center of mass: ({x_com:+.3f}, {z_com:+.3f}) m")
print(f"hand point:     ({x_h1:+.3f}, {x_h2:+.3f}) m")

print("\nbalance point as the human pulls harder (no vertical force):")
print(f"{'pull [N]':>9} {'zmp full':>10} {'zmp simplified':>15} {'in margin':>10} {'in support':>11}")
for f in (0.0, 50.0, 100.0, 150.0, 200.0):
    full = zmp_static_full(model, q, HandWrench(f_h1=f))
    simple = zmp_static_simplified(model, q, f)
    res = support_check(full, (-0.05, 0.05), model.foot_extent)
    print(
        f"{f:9.0f} {full:10.4f} {simple:15.4f} {str(res.inside_margin):>10}"
        f" {str(res.inside_support):>11}"
    )

print(
    "\nHolding the ready pose, pulls beyond ~120 N drive the balance point"
    "\npast the support edge: the robot must move, and how it should move"
    "\nis exactly what the planned manifold answers (see demo 03)."
)
