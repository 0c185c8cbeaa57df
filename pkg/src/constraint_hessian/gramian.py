"""Gramian matrices, Lagrange multipliers and restricted Hessians.

Everything here works for an arbitrary constraint manifold
``S = F^{-1}(c)`` embedded in a Euclidean ambient space: the only data used
are gradients and Hessians of the cost and the constraint functions in
ambient coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import ContractViolation, SingularGramianError
from .fields import ScalarField, ambient_hessian, check_point

TANGENCY_RTOL = 1e-10


@dataclass(frozen=True)
class ConstraintSystem:
    """Ordered constraint functions ``F_1..F_k`` and the regular value ``c``."""

    constraints: tuple
    regular_value: np.ndarray
    names: tuple = field(default=())

    def __post_init__(self):
        cons = tuple(self.constraints)
        if not cons:
            raise ContractViolation("a constraint system needs at least one constraint")
        dims = {f.dim for f in cons}
        if len(dims) != 1:
            raise ContractViolation(f"constraints live on different ambient dimensions {sorted(dims)}")
        c = np.asarray(self.regular_value, dtype=float).reshape(-1)
        if c.shape[0] != len(cons):
            raise ContractViolation(f"{len(cons)} constraints but regular value of length {c.shape[0]}")
        if len(cons) >= cons[0].dim:
            raise ContractViolation(f"need k < m, got k={len(cons)}, m={cons[0].dim}")
        object.__setattr__(self, "constraints", cons)
        object.__setattr__(self, "regular_value", c)
        if not self.names:
            object.__setattr__(self, "names", tuple(f.name for f in cons))

    @property
    def k(self) -> int:
        return len(self.constraints)

    @property
    def dim(self) -> int:
        return self.constraints[0].dim

    @property
    def manifold_dim(self) -> int:
        return self.dim - self.k

    def values(self, x) -> np.ndarray:
        return np.array([f.value(x) for f in self.constraints])

    def residual(self, x) -> np.ndarray:
        """``F(x) - c``."""
        return self.values(check_point(self.constraints[0], x)) - self.regular_value

    def gradients(self, x) -> np.ndarray:
        """Constraint gradients stacked as rows, shape ``(k, m)``."""
        x = check_point(self.constraints[0], x)
        return np.array([np.asarray(f.gradient(x), dtype=float) for f in self.constraints])


@dataclass(frozen=True)
class GramianReport:
    matrix: np.ndarray
    determinant: float
    conformal_factor: float


@dataclass(frozen=True)
class TangentBasis:
    """Ambient vectors (rows of ``vectors``) spanning the tangent space at ``base_point``."""

    base_point: np.ndarray
    vectors: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "base_point", np.asarray(self.base_point, dtype=float))
        vecs = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        if vecs.shape[1] != self.base_point.shape[0]:
            raise ContractViolation(
                f"basis vectors of length {vecs.shape[1]} at a point of dimension {self.base_point.shape[0]}"
            )
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """Basis vectors as columns, shape ``(m, d)``."""
        return self.vectors.T

    def permuted(self, order: Sequence[int]) -> "TangentBasis":
        labels = tuple(self.labels[i] for i in order) if self.labels else ()
        return TangentBasis(self.base_point, self.vectors[list(order)], labels)

    def check_tangent(self, cs: ConstraintSystem) -> None:
        """Raise :class:`ContractViolation` unless the basis is tangent to ``cs`` and independent."""
        grads = cs.gradients(self.base_point)
        dots = np.abs(self.vectors @ grads.T)
        bound = TANGENCY_RTOL * np.outer(
            np.linalg.norm(self.vectors, axis=1), np.linalg.norm(grads, axis=1)
        )
        if np.any(dots > bound):
            i, j = np.unravel_index(np.argmax(dots - bound), dots.shape)
            raise ContractViolation(
                f"basis vector {i} is not tangent: <v, grad F_{j + 1}> = {dots[i, j]:.3e}"
            )
        sv = np.linalg.svd(self.vectors, compute_uv=False)
        if sv[-1] <= 1e-12 * max(sv[0], 1.0):
            raise ContractViolation("basis vectors are linearly dependent")


@dataclass(frozen=True)
class RestrictedHessian:
    """Riemannian Hessian of a cost on ``S`` expressed in a tangent basis."""

    matrix: np.ndarray
    basis: TangentBasis
    multipliers: np.ndarray

    def permuted(self, order: Sequence[int]) -> "RestrictedHessian":
        """The same bilinear form in the basis re-ordered by ``order``."""
        order = list(order)
        return RestrictedHessian(
            self.matrix[np.ix_(order, order)], self.basis.permuted(order), self.multipliers
        )


def _grad_rows(fields: Sequence[ScalarField], x) -> np.ndarray:
    if not fields:
        raise ContractViolation("empty list of fields")
    dims = {f.dim for f in fields}
    if len(dims) != 1:
        raise ContractViolation(f"fields live on different ambient dimensions {sorted(dims)}")
    x = check_point(fields[0], x)
    return np.array([np.asarray(f.gradient(x), dtype=float) for f in fields])


def gramian(rows: Sequence[ScalarField], cols: Sequence[ScalarField], x) -> np.ndarray:
    """Gramian matrix with entry ``(i, j) = <grad cols[j], grad rows[i]>``."""
    if rows[0].dim != cols[0].dim:
        raise ContractViolation("row and column fields live on different ambient spaces")
    return _grad_rows(rows, x) @ _grad_rows(cols, x).T


def _singular_tol(sigma: np.ndarray) -> float:
    k = sigma.shape[0]
    return 1e-12 * (np.trace(sigma) / k) ** k


def gramian_report(cs: ConstraintSystem, x) -> GramianReport:
    grads = cs.gradients(x)
    mat = grads @ grads.T
    det = float(np.linalg.det(mat))
    conformal = 1.0 / det if det > _singular_tol(mat) else float("inf")
    return GramianReport(mat, det, conformal)


def _cost_column(cs: ConstraintSystem, cost: ScalarField, x) -> tuple:
    if cost.dim != cs.dim:
        raise ContractViolation(f"cost on R^{cost.dim} but constraints on R^{cs.dim}")
    grads = cs.gradients(x)
    grad_g = np.asarray(cost.gradient(check_point(cost, x)), dtype=float)
    return grads, grad_g, grads @ grad_g


def sigma_multipliers(cs: ConstraintSystem, cost: ScalarField, x) -> np.ndarray:
    """Multipliers ``sigma_i(x)`` of the cost relative to the constraints.

    Solves the Gramian system ``Sigma sigma = (<grad G, grad F_i>)_i`` by a
    Cholesky factorization; by Cramer's rule this is the determinant ratio
    with ``G`` substituted in the ``i``-th column.
    """
    grads, _, rhs = _cost_column(cs, cost, x)
    sigma = grads @ grads.T
    det = np.linalg.det(sigma)
    if not det > _singular_tol(sigma):
        raise SingularGramianError(f"Gramian determinant {det:.3e} is numerically zero")
    return scipy.linalg.cho_solve(scipy.linalg.cho_factor(sigma), rhs)


def _substituted_determinants(grads: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    sigma = grads @ grads.T
    dets = np.empty(sigma.shape[0])
    for i in range(sigma.shape[0]):
        sub = sigma.copy()
        sub[:, i] = rhs
        dets[i] = np.linalg.det(sub)
    return dets


def sigma_multipliers_cramer(cs: ConstraintSystem, cost: ScalarField, x) -> np.ndarray:
    """Literal determinant-ratio multipliers; slow, kept as a cross-check."""
    grads, _, rhs = _cost_column(cs, cost, x)
    sigma = grads @ grads.T
    det = np.linalg.det(sigma)
    if not det > _singular_tol(sigma):
        raise SingularGramianError(f"Gramian determinant {det:.3e} is numerically zero")
    return _substituted_determinants(grads, rhs) / det


def standard_control_field(cs: ConstraintSystem, cost: ScalarField, x) -> np.ndarray:
    """``v0 = Sigma grad G - sum_i det(Sigma with G in column i) grad F_i``.

    Defined at every point, including where the Gramian degenerates.
    """
    grads, grad_g, rhs = _cost_column(cs, cost, x)
    det = np.linalg.det(grads @ grads.T)
    return det * grad_g - _substituted_determinants(grads, rhs) @ grads


def induced_gradient(cs: ConstraintSystem, cost: ScalarField, x) -> np.ndarray:
    """``grad G - sum_i sigma_i grad F_i``; the induced-metric gradient on ``S``."""
    grads, grad_g, _ = _cost_column(cs, cost, x)
    return grad_g - sigma_multipliers(cs, cost, x) @ grads


def corrected_ambient_hessian(cs: ConstraintSystem, cost: ScalarField, x, sigma) -> np.ndarray:
    """``Hess G(x) - sum_i sigma_i Hess F_i(x)`` in ambient coordinates."""
    mat = ambient_hessian(cost, x)
    for s, f in zip(sigma, cs.constraints):
        if s != 0.0:
            mat = mat - s * ambient_hessian(f, x)
    return mat


def restricted_hessian(cs: ConstraintSystem, cost: ScalarField, basis: TangentBasis) -> RestrictedHessian:
    """Riemannian Hessian of ``cost|S`` at ``basis.base_point`` in the given basis.

    Valid at every point of ``S``, critical or not.
    """
    basis.check_tangent(cs)
    x = basis.base_point
    sigma = sigma_multipliers(cs, cost, x)
    B = basis.matrix
    mat = B.T @ corrected_ambient_hessian(cs, cost, x, sigma) @ B
    return RestrictedHessian(0.5 * (mat + mat.T), basis, sigma)


def null_space_basis(cs: ConstraintSystem, x) -> TangentBasis:
    """An orthonormal tangent basis at ``x`` from the null space of the constraint Jacobian."""
    x = check_point(cs.constraints[0], x)
    ns = scipy.linalg.null_space(cs.gradients(x))
    if ns.shape[1] != cs.manifold_dim:
        raise SingularGramianError(
            f"constraint gradients have rank {cs.dim - ns.shape[1]} < k={cs.k} at this point"
        )
    return TangentBasis(x, ns.T)
