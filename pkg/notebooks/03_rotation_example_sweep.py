"""
Critical rotations of the three-sample averaging problem
========================================================

Samples Rx(pi), Rx(pi/2) and Rx(alpha).  Five candidate families are built
from quaternions; we classify them and sweep alpha.
"""

import numpy as np

from constraint_hessian import so3

np.set_printoptions(precision=6, suppress=True)

# The even quartic whose roots fix the rotation angles of the x-axis families.
print("quartic at alpha=pi:", so3.q_polynomial(np.pi))
print("its positive roots:", so3.solve_Q(np.pi))

# All families at alpha = 0.
for rep in so3.critical_sets(0.0):
    print(f"{rep.set_label:6s} q={rep.quaternion.q}  eig={rep.eigenvalues}  "
          f"{rep.classification:10s} residual={rep.residual:.1e}")

# The black family's spectrum has a closed form.
for alpha in (0.0, np.pi / 2, np.pi):
    (row,) = so3.sweep([alpha], labels=("black",))
    print(f"alpha={alpha:.4f}: computed {row.eigenvalues}, closed form {row.closed_form}")

# Along the sweep, green and blue swap roles at two parameter values.
grid = np.linspace(-np.pi, np.pi, 181)[1:-1] + 1e-3
for label in ("green", "blue"):
    print(label, "determinant changes sign at", so3.locate_bifurcations(label, grid))

# Green and blue are genuine critical points only at a few alpha values.
for alpha in (-np.pi / 2, 0.0, 1.0, 2.5):
    res = {r.set_label: r.residual for r in so3.critical_sets(alpha)}
    print(f"alpha={alpha: .4f}", {k: f"{v:.1e}" for k, v in res.items()})
