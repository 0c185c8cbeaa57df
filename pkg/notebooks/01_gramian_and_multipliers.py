"""
Gramians, multipliers and the induced gradient
==============================================

A walk through the generic machinery on the unit sphere and on O(3).
"""

import numpy as np

from constraint_hessian import orthogonal, so3
from constraint_hessian.fields import half_norm_squared, quadratic_field
from constraint_hessian.gramian import (
    ConstraintSystem,
    gramian_report,
    induced_gradient,
    null_space_basis,
    restricted_hessian,
    sigma_multipliers,
    standard_control_field,
)

np.set_printoptions(precision=6, suppress=True)

# The unit sphere S^2 is the level set 1/2 |x|^2 = 1/2.
sphere = ConstraintSystem((half_norm_squared(3),), [0.5])
x = np.array([0.0, 0.6, 0.8])

# A height function G(x) = -z.  Its multiplier is <grad G, x> / |x|^2.
height = quadratic_field(np.zeros((3, 3)), [0.0, 0.0, -1.0])
print("sphere multiplier:", sigma_multipliers(sphere, height, x))

# The induced gradient is the tangential part of grad G.
print("induced gradient:", induced_gradient(sphere, height, x))

# Any orthonormal basis of the tangent plane works for the restricted Hessian.
basis = null_space_basis(sphere, x)
print("restricted Hessian on the sphere:\n", restricted_hessian(sphere, height, basis).matrix)

# On O(3) the six orthonormality constraints have Gramian diag(1,1,1,2,2,2).
o3 = orthogonal.constraint_system(3)
X = orthogonal.random_orthogonal(3, np.random.default_rng(0))
report = gramian_report(o3, orthogonal.flatten(X))
print("O(3) Gramian:\n", report.matrix)
print("determinant:", report.determinant, "conformal factor:", report.conformal_factor)

# The rotation-averaging cost with samples Rx(pi), Rx(pi/2), Rx(0).
cost = so3.power2_cost(so3.example_samples(0.0))
ident = orthogonal.flatten(np.eye(3))
print("multipliers at I:", sigma_multipliers(o3, cost, ident))
print("control field at I:", standard_control_field(o3, cost, ident))
# The identity is not critical: the control field equals 8 times the induced gradient.
print("induced gradient at I:", induced_gradient(o3, cost, ident))
