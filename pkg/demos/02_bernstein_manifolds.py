"""Bernstein basis rows and manifold evaluation mechanics.

A manifold stores control points per reduced joint; evaluating it mixes
the control points by the basis row at s. Endpoint interpolation means
the first and last control points are hit exactly, which is how the
planner pins the starting pose.
"""

import numpy as np

from stancepath.basis import (
    BernsteinBasis,
    ManifoldSpec,
    basis_row,
    eval_config,
    eval_config_derivative,
)
from stancepath.model import CoordinationMatrix

basis = BernsteinBasis(degree=10)
print("degree 10 basis rows (11 functions), sampled:")
for s in (0.0, 0.25, 0.5, 1.0):
    row = basis_row(basis, s)
    print(f"  s={s:4.2f}: sum={row.sum():.12f}, argmax={int(np.argmax(row))}")

# a paired coordination matrix: two full joints per reduced joint, the
# mechanism a symmetric biped uses to fold 14 joints onto 7
C = CoordinationMatrix.paired(2)
print("\npaired coordination matrix (4 full joints from 2 reduced):")
print(C.entries)

rng = np.random.default_rng(1)
manifold = ManifoldSpec(
    basis=BernsteinBasis(3),
    C=C,
    w=rng.uniform(-0.5, 0.5, size=2 * 4),
    f_max=200.0,
    delta_margin=(-0.05, 0.05),
    hand_displacement_cap=0.1,
    model_fingerprint="demo",
)
print("\nconfigurations along the manifold (columns are full joints):")
for s in np.linspace(0, 1, 5):
    q = eval_config(manifold, float(s))
    print(f"  s={s:4.2f}: {np.round(q, 3)}")
print("note each reduced value is copied to its joint pair, left = right")

dq = eval_config_derivative(manifold, 0.5)
print(f"\nmanifold slope dq/ds at s=0.5: {np.round(dq, 3)}")
print("(the runtime controller multiplies this by ds/dt to bound joint speed)")
