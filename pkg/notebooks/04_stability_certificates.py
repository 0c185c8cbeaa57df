"""
Stability certificates
======================

Criticality, restricted definiteness and a sampled decay check, applied to
the rotation-averaging equilibria.
"""

from constraint_hessian import orthogonal, so3
from constraint_hessian.stability import (
    VectorFieldSpec,
    augmented_hessian,
    neg_gradient_field,
    stability_certificate,
)

o3 = orthogonal.constraint_system(3)
alpha = 0.0
cost = so3.power2_cost(so3.example_samples(alpha))


def point(label):
    return orthogonal.flatten(so3.quaternion_to_rotation(so3.set_quaternions(label, alpha)))


# Without a vector field the decay condition is skipped and recorded as such.
for label in ("red", "pink", "black"):
    x = point(label)
    v = stability_certificate(o3, cost, None, x, orthogonal.nu_basis(x))
    print(f"{label:6s} {v.verdict:28s} min eigenvalue {v.min_eigenvalue: .6f}")

# Gradient descent satisfies the decay condition near the red minimum ...
x = point("red")
basis = orthogonal.nu_basis(x)
print("descent:", stability_certificate(o3, cost, neg_gradient_field(cost), x, basis).verdict)
# ... gradient ascent does not.
ascent = VectorFieldSpec(9, cost.gradient, "grad G")
v = stability_certificate(o3, cost, ascent, x, basis, n_samples=100)
print("ascent:", v.verdict, "violations:", v.decay_violations)

# Freezing the multipliers at the equilibrium gives the same Hessian.
print("augmented Hessian at red:\n", augmented_hessian(o3, cost, x, basis).matrix)
