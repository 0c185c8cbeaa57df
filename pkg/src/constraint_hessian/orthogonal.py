"""Closed-form formulas for the orthogonal group O(n) embedded in R^(n*n).

Points are flattened row by row: ``x = (x_1, ..., x_n)`` where ``x_i`` is the
``i``-th row of ``X``.  The group is the level set of

    F_s  = 1/2 |x_s|^2          (s = 1..n)       at value 1/2
    F_pq = <x_p, x_q>           (1 <= p < q <= n) at value 0

taken in that order.  Index pairs ``(alpha, beta)`` below are 1-based, as in
the usual matrix notation; arrays are indexed 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import ContractViolation, OffManifoldError, ParameterError
from .fields import ScalarField, ambient_hessian
from .gramian import ConstraintSystem, RestrictedHessian, TangentBasis

ORTHO_TOL = 1e-10
NU_ORDER = (2, 1, 0)


def skew_pairs(n: int) -> list:
    """Index pairs ``(alpha, beta)``, 1-based, ``alpha < beta``, in lexicographic order."""
    return [(a + 1, b + 1) for a, b in combinations(range(n), 2)]


def flatten(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return X.reshape(-1).copy()


def unflatten(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    n = int(round(np.sqrt(x.shape[0])))
    if n * n != x.shape[0]:
        raise ContractViolation(f"length {x.shape[0]} is not a perfect square")
    return x.reshape(n, n).copy()


@dataclass(frozen=True)
class OrthogonalPoint:
    """A point of O(n) stored as its row-major flattening."""

    n: int
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        if x.shape[0] != self.n * self.n:
            raise ContractViolation(f"expected {self.n * self.n} coordinates, got {x.shape[0]}")
        object.__setattr__(self, "x", x)
        err = orthogonality_error(x.reshape(self.n, self.n))
        if err > ORTHO_TOL:
            raise OffManifoldError(f"point is off O({self.n}): max |X X^T - I| = {err:.3e}")

    @classmethod
    def from_matrix(cls, X) -> "OrthogonalPoint":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise ContractViolation(f"expected a square matrix, got shape {X.shape}")
        return cls(X.shape[0], X.reshape(-1))

    @property
    def matrix(self) -> np.ndarray:
        return self.x.reshape(self.n, self.n)


def orthogonality_error(X) -> float:
    X = np.asarray(X, dtype=float)
    return float(np.max(np.abs(X @ X.T - np.eye(X.shape[0]))))


def as_point(p) -> OrthogonalPoint:
    if isinstance(p, OrthogonalPoint):
        return p
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 2:
        return OrthogonalPoint.from_matrix(arr)
    return OrthogonalPoint(int(round(np.sqrt(arr.shape[0]))), arr)


def random_orthogonal(n: int, rng: np.random.Generator, special: bool = False) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix)."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    if special and np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


@dataclass(frozen=True)
class SkewBasisElement:
    """``Omega_ab = (-1)^(a+b) (e_a e_b^T - e_b e_a^T)`` for ``1 <= a < b <= n``."""

    alpha: int
    beta: int

    def __post_init__(self):
        if not 1 <= self.alpha < self.beta:
            raise ParameterError(f"need 1 <= alpha < beta, got ({self.alpha}, {self.beta})")

    @property
    def sign(self) -> int:
        return -1 if (self.alpha + self.beta) % 2 else 1

    def matrix(self, n: int) -> np.ndarray:
        if self.beta > n:
            raise ParameterError(f"beta={self.beta} exceeds n={n}")
        W = np.zeros((n, n))
        W[self.alpha - 1, self.beta - 1] = self.sign
        W[self.beta - 1, self.alpha - 1] = -self.sign
        return W


def skew_combination(n: int, coeffs) -> np.ndarray:
    """``sum_ab c_ab Omega_ab`` with coefficients in lexicographic pair order."""
    coeffs = np.asarray(coeffs, dtype=float)
    pairs = skew_pairs(n)
    if coeffs.shape != (len(pairs),):
        raise ContractViolation(f"expected {len(pairs)} coefficients, got shape {coeffs.shape}")
    return sum(c * SkewBasisElement(a, b).matrix(n) for c, (a, b) in zip(coeffs, pairs))


# -- constraints --------------------------------------------------------------

def _row_norm_field(n: int, s: int) -> ScalarField:
    sl = slice(s * n, (s + 1) * n)
    hess = np.zeros((n * n, n * n))
    hess[sl, sl] = np.eye(n)

    def grad(x):
        g = np.zeros(n * n)
        g[sl] = x[sl]
        return g

    return ScalarField(
        n * n, lambda x: 0.5 * float(x[sl] @ x[sl]), grad, lambda x: hess.copy(), name=f"F_{s + 1}"
    )


def _row_dot_field(n: int, p: int, q: int) -> ScalarField:
    sp, sq = slice(p * n, (p + 1) * n), slice(q * n, (q + 1) * n)
    hess = np.zeros((n * n, n * n))
    hess[sp, sq] = np.eye(n)
    hess[sq, sp] = np.eye(n)

    def grad(x):
        g = np.zeros(n * n)
        g[sp] = x[sq]
        g[sq] = x[sp]
        return g

    return ScalarField(
        n * n, lambda x: float(x[sp] @ x[sq]), grad, lambda x: hess.copy(), name=f"F_{p + 1}{q + 1}"
    )


@lru_cache(maxsize=None)
def constraint_system(n: int) -> ConstraintSystem:
    """The ``n + n(n-1)/2`` constraints cutting O(n) out of R^(n*n)."""
    if int(n) != n or n < 2:
        raise ParameterError(f"n must be an integer >= 2, got {n!r}")
    fields = [_row_norm_field(n, s) for s in range(n)]
    fields += [_row_dot_field(n, p - 1, q - 1) for p, q in skew_pairs(n)]
    value = np.concatenate([np.full(n, 0.5), np.zeros(n * (n - 1) // 2)])
    return ConstraintSystem(tuple(fields), value)


@lru_cache(maxsize=None)
def _pair_index(n: int) -> tuple:
    pairs = np.array(skew_pairs(n)) - 1
    rows = np.arange(n, n + len(pairs))
    return rows, pairs[:, 0], pairs[:, 1]


def constraint_gradients(p) -> np.ndarray:
    """Rows ``grad F_s`` then ``grad F_pq`` at ``p``, from the closed forms."""
    p = as_point(p)
    n, X = p.n, p.matrix
    rows, a, b = _pair_index(n)
    out = np.zeros((len(rows) + n, n, n))
    out[np.arange(n), np.arange(n)] = X
    out[rows, a] = X[b]
    out[rows, b] = X[a]
    return out.reshape(len(out), n * n)


@lru_cache(maxsize=None)
def _omega_index(pairs: tuple) -> tuple:
    idx = np.array(pairs) - 1
    a, b = idx[:, 0], idx[:, 1]
    return np.arange(len(pairs)), a, b, np.where((a + b) % 2, -1.0, 1.0)[:, None]


def _omega_vectors(X, pairs) -> np.ndarray:
    # X Omega_ab has column b equal to sign * x^a and column a equal to -sign * x^b
    n = X.shape[0]
    r, a, b, sign = _omega_index(tuple(pairs))
    out = np.zeros((len(r), n, n))
    out[r, :, b] = sign * X[:, a].T
    out[r, :, a] = -sign * X[:, b].T
    return out.reshape(len(r), n * n)


def tangent_basis(p) -> TangentBasis:
    """The basis ``omega_ab = I(X Omega_ab)`` of the tangent space, lexicographic in ``(a, b)``."""
    p = as_point(p)
    pairs = skew_pairs(p.n)
    labels = tuple(f"omega_{a}{b}" for a, b in pairs)
    return TangentBasis(p.x, _omega_vectors(p.matrix, pairs), labels)


def nu_basis(p) -> TangentBasis:
    """For O(3): ``(nu_1, nu_2, nu_3) = (omega_23, omega_13, omega_12)``."""
    p = as_point(p)
    if p.n != 3:
        raise ParameterError("the nu basis is defined for n = 3 only")
    pairs = [skew_pairs(3)[i] for i in NU_ORDER]
    return TangentBasis(p.x, _omega_vectors(p.matrix, pairs), ("nu_1", "nu_2", "nu_3"))


def gramian_determinant(p) -> float:
    """Constraint Gramian determinant on O(n), equal to ``2^(n(n-1)/2)``."""
    p = as_point(p)
    closed = 2.0 ** (p.n * (p.n - 1) // 2)
    grads = constraint_system(p.n).gradients(p.x)
    numeric = np.linalg.det(grads @ grads.T)
    if abs(numeric - closed) > 1e-9 * closed:
        raise OffManifoldError(f"numeric Gramian determinant {numeric!r} differs from {closed!r}")
    return closed


def sigma_closed_form(cost: ScalarField, p) -> np.ndarray:
    """Multipliers on O(n) without solving a linear system.

    ``sigma_s = <grad G, grad F_s>`` and ``sigma_pq = 1/2 <grad G, grad F_pq>``,
    which hold because the Gramian is ``diag(I_n, 2 I)`` on O(n).
    """
    p = as_point(p)
    dots = constraint_gradients(p) @ np.asarray(cost.gradient(p.x), dtype=float)
    dots[p.n:] *= 0.5
    return dots


def restricted_hessian_on(cost: ScalarField, p) -> RestrictedHessian:
    """Restricted Hessian on O(n) in the ``omega`` basis, entry by entry.

    Evaluates the explicit ``(gamma tau)(alpha beta)`` component formula,
    signs ``eps = (-1)^(alpha + beta + gamma + tau)`` included.
    """
    p = as_point(p)
    n, X = p.n, p.matrix
    H4 = ambient_hessian(cost, p.x).reshape(n, n, n, n)
    dG = np.asarray(cost.gradient(p.x), dtype=float).reshape(n, n)
    sig_row = np.einsum("si,si->s", X, dG)
    # twice sigma_pq
    sig_pair = dG @ X.T + X @ dG.T
    pairs = [(a - 1, b - 1) for a, b in skew_pairs(n)]
    d = len(pairs)
    eye = np.eye(n)
    out = np.empty((d, d))
    for r, (g, t) in enumerate(pairs):
        for col, (a, b) in enumerate(pairs):
            eps = (-1) ** (a + b + g + t)
            second = (
                X[:, g] @ H4[:, t, :, b] @ X[:, a]
                - X[:, g] @ H4[:, t, :, a] @ X[:, b]
                - X[:, t] @ H4[:, g, :, b] @ X[:, a]
                + X[:, t] @ H4[:, g, :, a] @ X[:, b]
            )
            rows = sum(
                sig_row[s]
                * (
                    X[s, t] * X[s, b] * eye[g, a]
                    - X[s, g] * X[s, b] * eye[t, a]
                    - X[s, t] * X[s, a] * eye[g, b]
                    + X[s, g] * X[s, a] * eye[t, b]
                )
                for s in range(n)
            )
            cross = 0.0
            for pp, qq in combinations(range(n), 2):
                cross += sig_pair[pp, qq] * (
                    X[pp, t] * X[qq, b] * eye[g, a]
                    - X[pp, g] * X[qq, b] * eye[t, a]
                    - X[pp, t] * X[qq, a] * eye[g, b]
                    + X[pp, g] * X[qq, a] * eye[t, b]
                    + X[qq, t] * X[pp, b] * eye[g, a]
                    - X[qq, g] * X[pp, b] * eye[t, a]
                    - X[qq, t] * X[pp, a] * eye[g, b]
                    + X[qq, g] * X[pp, a] * eye[t, b]
                )
            out[r, col] = eps * second - eps * rows - 0.5 * eps * cross
    sigma = np.concatenate([sig_row, 0.5 * sig_pair[np.triu_indices(n, 1)]])
    return RestrictedHessian(0.5 * (out + out.T), tangent_basis(p), sigma)


# -- geodesic oracle ---------------------------------------------------------

def matrix_exponential(omega, t: float = 1.0) -> np.ndarray:
    """``exp(t * omega)`` for antisymmetric ``omega`` by scaling and squaring.

    A truncated Taylor series is applied to ``t * omega / 2^s`` with
    ``|t * omega / 2^s|_1 <= 1/2`` and the result squared ``s`` times.
    """
    W = np.asarray(omega, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {W.shape}")
    if np.max(np.abs(W + W.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(W), initial=0.0)):
        raise ContractViolation("matrix is not antisymmetric")
    A = t * W
    norm = np.linalg.norm(A, 1)
    s = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0 else 0
    A = A / 2.0**s
    n = A.shape[0]
    result = np.eye(n)
    term = np.eye(n)
    for j in range(1, 30):
        term = term @ A / j
        result = result + term
        if np.max(np.abs(term)) < 1e-18:
            break
    for _ in range(s):
        result = result @ result
    return result


def geodesic_second_derivative(cost: ScalarField, p, omega, h: float = 1e-3, richardson: bool = False) -> float:
    """Second difference of ``t -> G(I(X exp(t omega)))`` at ``t = 0``.

    ``t -> X exp(t omega)`` is a geodesic of O(n) with the induced metric, so
    this approximates the Riemannian Hessian quadratic form at
    ``I(X omega)``.  ``omega`` is an antisymmetric matrix or a
    :class:`SkewBasisElement`.
    """
    if not h > 0:
        raise ParameterError(f"step h must be positive, got {h!r}")
    p = as_point(p)
    if isinstance(omega, SkewBasisElement):
        omega = omega.matrix(p.n)
    X = p.matrix

    def second_diff(step):
        plus = cost.value(flatten(X @ matrix_exponential(omega, step)))
        minus = cost.value(flatten(X @ matrix_exponential(omega, -step)))
        return (plus - 2.0 * cost.value(p.x) + minus) / step**2

    if richardson:
        return (4.0 * second_diff(h / 2) - second_diff(h)) / 3.0
    return second_diff(h)
