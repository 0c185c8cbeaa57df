"""
The restricted Hessian on O(n)
==============================

The entry-by-entry formula in the skew-symmetric basis, checked against the
generic congruence path and against second differences along geodesics.
"""

import numpy as np

from constraint_hessian import orthogonal
from constraint_hessian.fields import random_quadratic
from constraint_hessian.gramian import restricted_hessian

np.set_printoptions(precision=6, suppress=True)
rng = np.random.default_rng(1)

n = 4
X = orthogonal.random_orthogonal(n, rng)
cost = random_quadratic(n * n, rng)

# Tangent basis omega_ab = I(X Omega_ab); squared norms are 2.
basis = orthogonal.tangent_basis(X)
print("labels:", basis.labels)
print("Gram matrix of the basis:\n", basis.vectors @ basis.vectors.T)

# The explicit component formula ...
H = orthogonal.restricted_hessian_on(cost, X).matrix
# ... and the generic path agree.
H_generic = restricted_hessian(orthogonal.constraint_system(n), cost, basis).matrix
print("max difference to the generic path:", np.abs(H - H_generic).max())

# Geodesics of O(n) are t -> X exp(t Omega).  The second derivative of the
# cost along one equals the quadratic form of the restricted Hessian.
for (a, b), h_aa in zip(orthogonal.skew_pairs(n), np.diag(H)):
    fd = orthogonal.geodesic_second_derivative(cost, X, orthogonal.SkewBasisElement(a, b))
    print(f"omega_{a}{b}: formula {h_aa: .8f}  geodesic {fd: .8f}")

# The point need not be critical: a random direction works the same way.
c = rng.standard_normal(len(basis.labels))
c /= np.linalg.norm(c)
omega = orthogonal.skew_combination(n, c)
print("random direction:", c @ H @ c, orthogonal.geodesic_second_derivative(cost, X, omega, richardson=True))
