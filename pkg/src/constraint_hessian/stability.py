"""Eigenvalue classification and Lyapunov-type stability certificates.

A certificate combines three checks performed in ambient coordinates:
criticality of the cost on ``S``, positive definiteness of the restricted
Hessian, and (optionally) a sampled check that the cost does not increase
along a prolonged vector field.  The sampled check can only falsify; it never
proves decay on a neighbourhood.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConstraintHessianError, ContractViolation, OffManifoldError, ParameterError
from .fields import ScalarField, ambient_hessian, check_point
from .gramian import (
    ConstraintSystem,
    RestrictedHessian,
    TangentBasis,
    induced_gradient,
    restricted_hessian,
    sigma_multipliers,
)

CRITICAL_RTOL = 1e-9
ZERO_EIG_RTOL = 1e-8
ON_MANIFOLD_TOL = 1e-9

LOCAL_MIN = "local-min"
LOCAL_MAX = "local-max"
SADDLE = "saddle"
DEGENERATE = "degenerate"

CERTIFIED = "certified-stable"
CERTIFIED_MODULO_DECAY = "certified-stable-modulo-(i)"
NOT_CRITICAL = "not-critical"
NOT_DEFINITE = "not-definite"
DECAY_FAILED = "decay-failed"
DEGENERATE_VERDICT = "inconclusive-degenerate"


# -- symmetric eigensolver ----------------------------------------------------

def _check_symmetric(H) -> np.ndarray:
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {H.shape}")
    if H.size and abs(H - H.T).max() > 1e-12 * max(1.0, abs(H).max()):
        raise ContractViolation("matrix is not symmetric")
    return 0.5 * (H + H.T)


def jacobi_eigh(H, max_sweeps: int = 64, vectors: bool = True):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(w, V)`` with ``w`` ascending and ``H = V diag(w) V^T``.
    Iterates until the off-diagonal Frobenius norm is below
    ``1e-14 * |H|_F``.  Rotations run on Python floats, which is faster
    than numpy for the small matrices used here.  With ``vectors=False``
    ``V`` is not accumulated and ``None`` is returned in its place.
    """
    Hs = _check_symmetric(H)
    n = Hs.shape[0]
    A = Hs.tolist()
    V = np.eye(n).tolist() if vectors else []
    target = 1e-14 * math.sqrt(sum(v * v for row in A for v in row))
    for _ in range(max_sweeps):
        off = math.sqrt(sum(A[i][j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p][q]
                if apq == 0.0:
                    continue
                diff = A[q][q] - A[p][p]
                if abs(apq) < 1e-150 * abs(diff):
                    # rotation angle below double resolution
                    t = apq / diff
                elif diff == 0.0:
                    t = 1.0
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for row in A:
                    ap, aq = row[p], row[q]
                    row[p], row[q] = c * ap - s * aq, s * ap + c * aq
                rp, rq = A[p], A[q]
                A[p] = [c * x - s * y for x, y in zip(rp, rq)]
                A[q] = [s * x + c * y for x, y in zip(rp, rq)]
                A[p][q] = A[q][p] = 0.0
                for row in V:
                    vp, vq = row[p], row[q]
                    row[p], row[q] = c * vp - s * vq, s * vp + c * vq
    else:
        raise ConstraintHessianError("Jacobi iteration did not converge")
    w = np.array([A[i][i] for i in range(n)])
    order = np.argsort(w, kind="stable")
    return w[order], (np.array(V).reshape(n, n)[:, order] if vectors else None)


def symmetric_eigenvalues(H) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix (cyclic Jacobi)."""
    return jacobi_eigh(H, vectors=False)[0]


def zero_tolerance(H) -> float:
    H = np.asarray(H, dtype=float)
    return ZERO_EIG_RTOL * (1.0 + (abs(H).sum(axis=1).max() if H.size else 0.0))


def classify(eigenvalues, H) -> str:
    """Label a critical point from its Hessian spectrum.

    Any eigenvalue with ``|lambda| <= 1e-8 (1 + |H|_inf)`` makes the point
    degenerate.
    """
    w = np.asarray(eigenvalues, dtype=float)
    if not w.size:
        raise ContractViolation("cannot classify an empty spectrum")
    if abs(w).min() <= zero_tolerance(H):
        return DEGENERATE
    if w.min() > 0:
        return LOCAL_MIN
    if w.max() < 0:
        return LOCAL_MAX
    return SADDLE


# -- Lyapunov decay -----------------------------------------------------------

@dataclass(frozen=True)
class VectorFieldSpec:
    dim: int
    evaluate: Callable[[np.ndarray], np.ndarray]
    name: str = "X"


def neg_gradient_field(G: ScalarField) -> VectorFieldSpec:
    return VectorFieldSpec(G.dim, lambda x: -np.asarray(G.gradient(x), dtype=float), f"-grad {G.name}")


def sample_ball(center, radius: float, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Points uniformly distributed in the Euclidean ball around ``center``."""
    center = np.asarray(center, dtype=float)
    m = center.shape[0]
    dirs = rng.standard_normal((n_samples, m))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = radius * rng.random(n_samples) ** (1.0 / m)
    return center + dirs * radii[:, None]


def lyapunov_decay_check(X: VectorFieldSpec, G: ScalarField, center, radius: float,
                         n_samples: int, seed: Optional[int] = 0) -> int:
    """Count sampled points of the ball where ``<grad G, X> > 1e-12 (1 + |G(center)|)``.

    A zero count does not prove ``L_X G <= 0``; a positive count disproves it.
    """
    if not radius > 0:
        raise ParameterError(f"radius must be positive, got {radius!r}")
    if n_samples < 1:
        raise ParameterError(f"n_samples must be >= 1, got {n_samples!r}")
    center = check_point(G, center)
    if X.dim != G.dim:
        raise ContractViolation(f"vector field on R^{X.dim} but cost on R^{G.dim}")
    tol = 1e-12 * (1.0 + abs(G.value(center)))
    rng = np.random.default_rng(seed)
    count = 0
    for x in sample_ball(center, radius, n_samples, rng):
        if np.asarray(G.gradient(x)) @ np.asarray(X.evaluate(x)) > tol:
            count += 1
    return count


# -- certificates -------------------------------------------------------------

@dataclass(frozen=True)
class StabilityVerdict:
    critical_residual: float
    multipliers: np.ndarray
    hessian: RestrictedHessian
    eigenvalues: np.ndarray
    min_eigenvalue: float
    decay_violations: Optional[int]
    verdict: str

    @property
    def decay_checked(self) -> bool:
        return self.decay_violations is not None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "critical_residual": float(self.critical_residual),
            "multipliers": [float(v) for v in self.multipliers],
            "hessian": [[float(v) for v in row] for row in self.hessian.matrix],
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "min_eigenvalue": float(self.min_eigenvalue),
            "decay_check": "skipped" if self.decay_violations is None else "sampled",
            "decay_violations": self.decay_violations,
        }


def _check_on_manifold(cs: ConstraintSystem, x) -> None:
    res = np.max(np.abs(cs.residual(x)))
    if res > ON_MANIFOLD_TOL * (1.0 + np.max(np.abs(cs.regular_value))):
        raise OffManifoldError(f"point violates the constraints by {res:.3e}")


def critical_residual(cs: ConstraintSystem, G: ScalarField, x) -> tuple:
    """``|grad G - sum sigma_i grad F_i|_inf`` and the scale it is judged against."""
    resid = float(np.max(np.abs(induced_gradient(cs, G, x))))
    scale = 1.0 + float(np.max(np.abs(G.gradient(check_point(G, x)))))
    return resid, scale


def stability_certificate(cs: ConstraintSystem, G: ScalarField, X: Optional[VectorFieldSpec],
                          x_e, basis: TangentBasis, radius: float = 0.1, n_samples: int = 200,
                          seed: Optional[int] = 0) -> StabilityVerdict:
    """Check criticality, restricted positive definiteness and sampled decay at ``x_e``.

    Verdicts, in order of precedence: ``not-critical``,
    ``inconclusive-degenerate`` (a zero eigenvalue), ``not-definite``,
    ``certified-stable-modulo-(i)`` when no vector field is given,
    ``decay-failed`` and ``certified-stable``.
    """
    x_e = check_point(G, x_e)
    if not np.allclose(basis.base_point, x_e, rtol=0, atol=1e-14):
        raise ContractViolation("tangent basis is not attached to x_e")
    _check_on_manifold(cs, x_e)
    resid, scale = critical_residual(cs, G, x_e)
    hess = restricted_hessian(cs, G, basis)
    w = symmetric_eigenvalues(hess.matrix)
    violations = None
    if X is not None:
        violations = lyapunov_decay_check(X, G, x_e, radius, n_samples, seed)

    if resid > CRITICAL_RTOL * scale:
        verdict = NOT_CRITICAL
    elif np.any(np.abs(w) <= zero_tolerance(hess.matrix)):
        verdict = DEGENERATE_VERDICT
    elif w[0] < 0:
        verdict = NOT_DEFINITE
    elif violations is None:
        verdict = CERTIFIED_MODULO_DECAY
    elif violations > 0:
        verdict = DECAY_FAILED
    else:
        verdict = CERTIFIED
    return StabilityVerdict(resid, hess.multipliers, hess, w, float(w[0]), violations, verdict)


def augmented_field(cs: ConstraintSystem, H: ScalarField, sigma) -> ScalarField:
    """``H - sum_i sigma_i C_i`` with the multipliers held fixed."""
    sigma = np.array(sigma, dtype=float)
    out = H
    for s, c in zip(sigma, cs.constraints):
        out = out - c.scaled(float(s))
    return ScalarField(out.dim, out.value, out.gradient, out.hessian, H.christoffel, f"augmented {H.name}")


def augmented_hessian(cs: ConstraintSystem, H: ScalarField, x_e, basis: TangentBasis) -> RestrictedHessian:
    """Tangent restriction of the Hessian of the augmented function at an equilibrium.

    The multipliers are frozen at ``x_e``.  The result is compared with the
    restricted Hessian of ``H`` and returned only if the two agree.
    """
    x_e = check_point(H, x_e)
    resid, scale = critical_residual(cs, H, x_e)
    if resid > CRITICAL_RTOL * scale:
        raise ParameterError(f"x_e is not a critical point of H on S (residual {resid:.3e})")
    basis.check_tangent(cs)
    sigma = sigma_multipliers(cs, H, x_e)
    B = basis.matrix
    mat = B.T @ ambient_hessian(augmented_field(cs, H, sigma), x_e) @ B
    mat = 0.5 * (mat + mat.T)
    reference = restricted_hessian(cs, H, basis).matrix
    if np.max(np.abs(mat - reference)) > 1e-12 * max(1.0, np.linalg.norm(mat, np.inf)):
        raise ConstraintHessianError("augmented Hessian disagrees with the restricted Hessian")
    return RestrictedHessian(mat, basis, sigma)
