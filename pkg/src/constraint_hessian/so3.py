"""The 2-power (chordal Procrustes) cost on SO(3) and its critical points.

The cost is ``G(X) = 1/2 sum_i |X - R_i|_F^2`` for sample rotations
``R_1..R_k``.  For the three-sample family ``R_1, R_2, R_3(alpha)`` returned
by :func:`example_samples`, the critical rotations come in five labelled
families parametrized by unit quaternions (see :func:`critical_sets`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import ContractViolation, NoCriticalSetError, ParameterError
from .fields import ScalarField
from .gramian import RestrictedHessian, induced_gradient
from .orthogonal import (
    OrthogonalPoint,
    as_point,
    constraint_system,
    constraint_gradients,
    flatten,
    nu_basis,
    orthogonality_error,
    sigma_closed_form,
)
from .stability import classify, symmetric_eigenvalues

SET_LABELS = ("black", "green", "pink", "red", "blue")
SAMPLE_TOL = 1e-10


@dataclass(frozen=True)
class RotationSampleSet:
    samples: tuple

    def __post_init__(self):
        mats = tuple(np.array(R, dtype=float) for R in self.samples)
        if not mats:
            raise ParameterError("at least one sample rotation is required")
        for i, R in enumerate(mats):
            if R.shape != (3, 3):
                raise ContractViolation(f"sample {i} has shape {R.shape}, expected (3, 3)")
            if orthogonality_error(R) > SAMPLE_TOL or abs(np.linalg.det(R) - 1.0) > SAMPLE_TOL:
                raise ContractViolation(f"sample {i} is not a rotation matrix")
        object.__setattr__(self, "samples", mats)

    @property
    def k(self) -> int:
        return len(self.samples)

    @property
    def mean(self) -> np.ndarray:
        return sum(self.samples) / self.k

    @property
    def mean_flat(self) -> np.ndarray:
        return sum(flatten(R) for R in self.samples) / self.k


def rotation_x(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def example_samples(alpha: float) -> RotationSampleSet:
    """``R_1 = Rx(pi)``, ``R_2 = Rx(pi/2)``, ``R_3 = Rx(alpha)``, entered exactly."""
    R1 = np.diag([1.0, -1.0, -1.0])
    R2 = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
    return RotationSampleSet((R1, R2, rotation_x(alpha)))


def power2_cost(samples: RotationSampleSet) -> ScalarField:
    """``x -> 1/2 sum_i |x - r_i|^2`` on R^9, gradient ``k (x - r)``, Hessian ``k I``."""
    if not isinstance(samples, RotationSampleSet):
        samples = RotationSampleSet(tuple(samples))
    flats = np.array([flatten(R) for R in samples.samples])
    k = samples.k
    r = samples.mean_flat
    return ScalarField(
        9,
        lambda x: 0.5 * float(np.sum((x - flats) ** 2)),
        lambda x: k * (x - r),
        lambda x: k * np.eye(9),
        name=f"power2(k={k})",
    )


def hessian_coefficients(p, samples: RotationSampleSet, cost: Optional[ScalarField] = None) -> RestrictedHessian:
    """Restricted Hessian of the 2-power cost in the ``nu`` basis.

    With ``y_i`` the columns of ``X`` and ``s_i`` those of the sample mean,
    the diagonal is ``k (<y_j, s_j> + <y_l, s_l>)`` over the two indices
    other than ``i`` and the off-diagonal ``(i, j)`` entry is
    ``-k/2 (<y_i, s_j> + <y_j, s_i>)``.
    """
    p = as_point(p)
    if p.n != 3:
        raise ParameterError("hessian_coefficients is defined on O(3)")
    h = _hbar(p.matrix, samples)
    return RestrictedHessian(h, nu_basis(p), sigma_closed_form(cost or power2_cost(samples), p))


def _hbar(X, samples: RotationSampleSet) -> np.ndarray:
    S, k = samples.mean, samples.k
    D = X.T @ S  # D[i, j] = <y_i, s_j>
    h = np.empty((3, 3))
    h[0, 0] = k * (D[1, 1] + D[2, 2])
    h[1, 1] = k * (D[0, 0] + D[2, 2])
    h[2, 2] = k * (D[0, 0] + D[1, 1])
    h[0, 1] = h[1, 0] = -0.5 * k * (D[0, 1] + D[1, 0])
    h[0, 2] = h[2, 0] = -0.5 * k * (D[0, 2] + D[2, 0])
    h[1, 2] = h[2, 1] = -0.5 * k * (D[1, 2] + D[2, 1])
    return h


# -- quaternions ----------------------------------------------------------------

@dataclass(frozen=True)
class UnitQuaternion:
    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).reshape(-1)
        if q.shape != (4,):
            raise ContractViolation(f"a quaternion has 4 components, got {q.shape[0]}")
        if abs(q @ q - 1.0) > 1e-12:
            raise ContractViolation(f"quaternion is not unit: |q|^2 = {q @ q!r}")
        object.__setattr__(self, "q", q)


def quaternion_to_rotation(q) -> np.ndarray:
    """Rotation matrix of a unit quaternion ``(q0, q1, q2, q3)``, ``q0`` scalar."""
    if not isinstance(q, UnitQuaternion):
        q = UnitQuaternion(q)
    a, b, c, d = q.q
    return np.array([
        [a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)],
        [2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)],
        [2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d],
    ])


# -- the quartic ----------------------------------------------------------------

def q_polynomial(alpha: float) -> np.ndarray:
    """Coefficients, highest degree first, of the even quartic in ``Z``."""
    s, c = np.sin(alpha / 2), np.cos(alpha / 2)
    lead = 128 * s**4 - 32 * s**2 + 4
    const = -16 * s**6 + 16 * s**5 * c + 28 * s**4 - 8 * s**2 + 1
    return np.array([lead, 0.0, -lead, 0.0, const])


def solve_Q(alpha: float) -> tuple:
    """Smallest and largest non-negative roots of the quartic at ``alpha``.

    Solved as a quadratic in ``Z^2``.  The discriminant factors as
    ``16 lead s^4 ((2s - c)^2 + s^2)`` with ``s, c = sin, cos(alpha/2)``;
    using the factored form keeps the double root at ``alpha = 0`` exact.
    """
    if not -np.pi <= alpha <= np.pi:
        raise ParameterError(f"alpha must lie in [-pi, pi], got {alpha!r}")
    s, c = np.sin(alpha / 2), np.cos(alpha / 2)
    lead = 128 * s**4 - 32 * s**2 + 4
    # lead = 4 (32 s^4 - 8 s^2 + 1) has negative discriminant in s^2
    assert lead > 0
    disc = 16.0 * lead * s**4 * ((2 * s - c) ** 2 + s**2)
    if disc < 0:
        raise NoCriticalSetError(alpha)
    half_gap = np.sqrt(disc) / (2.0 * lead)
    w_low, w_high = 0.5 - half_gap, 0.5 + half_gap
    # w_low vanishes at alpha = -pi/2; clip the rounding residue there
    if w_low < -1e-12 or w_high > 1.0 + 1e-12:
        raise NoCriticalSetError(alpha)
    return float(np.sqrt(max(w_low, 0.0))), float(np.sqrt(min(w_high, 1.0)))


# -- critical sets -----------------------------------------------------------

@dataclass(frozen=True)
class CriticalPointReport:
    set_label: str
    quaternion: UnitQuaternion
    rotation: OrthogonalPoint
    multipliers: np.ndarray
    hessian: RestrictedHessian
    eigenvalues: np.ndarray
    classification: str
    residual: float
    alpha: float
    t: Optional[float] = None


def set_quaternions(label: str, alpha: float, t: float = 0.0, sign: int = 1) -> np.ndarray:
    """Quaternion of the critical family ``label`` at ``alpha``.

    ``black`` is ``(0, 0, sign*sqrt(1-t^2), t)``; the other four are
    ``(+-sqrt(1-x^2), x, 0, 0)`` with ``x`` the smaller root (green ``+``,
    pink ``-``) or the larger root (red ``+``, blue ``-``).
    """
    if label == "black":
        if not -1.0 <= t <= 1.0:
            raise ParameterError(f"t must lie in [-1, 1], got {t!r}")
        return np.array([0.0, 0.0, sign * np.sqrt(1.0 - t * t), t])
    if label not in SET_LABELS:
        raise ParameterError(f"unknown critical set {label!r}")
    x_min, x_max = solve_Q(alpha)
    x2 = x_min if label in ("green", "pink") else x_max
    w = np.sqrt(1.0 - x2 * x2)
    return np.array([w if label in ("green", "red") else -w, x2, 0.0, 0.0])


def report_at(label: str, alpha: float, q, samples: Optional[RotationSampleSet] = None,
              t: Optional[float] = None, cost: Optional[ScalarField] = None) -> CriticalPointReport:
    samples = samples or example_samples(alpha)
    cost = cost or power2_cost(samples)
    quat = UnitQuaternion(q)
    point = OrthogonalPoint.from_matrix(quaternion_to_rotation(quat))
    grads = constraint_gradients(point)
    dG = cost.gradient(point.x)
    # closed-form O(3) multipliers; the induced gradient needs no solve
    sigma = grads @ dG
    sigma[3:] *= 0.5
    resid = float(np.max(np.abs(dG - sigma @ grads)))
    hess = RestrictedHessian(_hbar(point.matrix, samples), nu_basis(point), sigma)
    w = symmetric_eigenvalues(hess.matrix)
    return CriticalPointReport(
        label, quat, point, hess.multipliers, hess, w, classify(w, hess.matrix), resid, alpha, t
    )


def critical_sets(alpha: float, t_grid: Sequence[float] = (0.0,),
                  labels: Iterable[str] = SET_LABELS) -> list:
    """Reports for the five families at ``alpha``.

    The black family is sampled at every ``t`` in ``t_grid`` and on both
    branches of ``+-sqrt(1-t^2)``.
    """
    if not -np.pi <= alpha <= np.pi:
        raise ParameterError(f"alpha must lie in [-pi, pi], got {alpha!r}")
    samples = example_samples(alpha)
    cost = power2_cost(samples)
    reports = []
    for label in labels:
        if label == "black":
            for t in t_grid:
                for sign in (1, -1):
                    q = set_quaternions("black", alpha, t, sign)
                    reports.append(report_at("black", alpha, q, samples, t, cost))
        else:
            reports.append(report_at(label, alpha, set_quaternions(label, alpha), samples, cost=cost))
    return reports


def verify_critical(report: CriticalPointReport, cost: ScalarField) -> float:
    """``|grad G - sum sigma_i grad F_i|_inf`` at the report's rotation."""
    return float(np.max(np.abs(induced_gradient(constraint_system(3), cost, report.rotation.x))))


def black_closed_form(alpha: float) -> np.ndarray:
    """``{0, -3 +- sqrt(3 + 2 sin(alpha) - 2 cos(alpha))}`` sorted ascending."""
    r = np.sqrt(3.0 + 2.0 * np.sin(alpha) - 2.0 * np.cos(alpha))
    return np.sort(np.array([0.0, -3.0 + r, -3.0 - r]))


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    set_label: str
    eigenvalues: Optional[np.ndarray]
    classification: str
    quaternion: Optional[np.ndarray]
    closed_form: Optional[np.ndarray] = None


def sweep(alpha_grid: Iterable[float], labels: Iterable[str] = SET_LABELS) -> list:
    """One row per ``(alpha, set)``, sorted by ``(alpha, set label)``.

    Black rows use the representative ``t = 0`` and carry the closed-form
    eigenvalues for comparison; rows whose quartic has no admissible root are
    marked ``absent``.
    """
    labels = list(labels)
    for label in labels:
        if label not in SET_LABELS:
            raise ParameterError(f"unknown critical set {label!r}")
    rows = []
    for alpha in alpha_grid:
        alpha = float(alpha)
        if not -np.pi <= alpha <= np.pi:
            raise ParameterError(f"alpha must lie in [-pi, pi], got {alpha!r}")
        samples = example_samples(alpha)
        cost = power2_cost(samples)
        for label in labels:
            try:
                q = set_quaternions(label, alpha)
            except NoCriticalSetError:
                rows.append(SweepRow(alpha, label, None, "absent", None))
                continue
            rep = report_at(label, alpha, q, samples, cost=cost)
            closed = black_closed_form(alpha) if label == "black" else None
            rows.append(SweepRow(alpha, label, rep.eigenvalues, rep.classification, rep.quaternion.q, closed))
    rows.sort(key=lambda r: (r.alpha, r.set_label))
    return rows


def _hessian_determinant(label: str, alpha: float) -> float:
    rep = report_at(label, alpha, set_quaternions(label, alpha))
    return float(np.prod(rep.eigenvalues))


def locate_bifurcations(label: str, alpha_grid: Sequence[float], xtol: float = 1e-14) -> list:
    """Parameter values where the Hessian determinant of a family changes sign.

    Sign changes of ``det H`` between consecutive grid points are refined
    with Brent's method; grid points where the determinant vanishes exactly
    are returned as they are.
    """
    grid = np.sort(np.asarray(alpha_grid, dtype=float))
    dets = [_hessian_determinant(label, a) for a in grid]
    roots = []
    for a0, a1, d0, d1 in zip(grid[:-1], grid[1:], dets[:-1], dets[1:]):
        if d0 == 0.0:
            roots.append(float(a0))
        elif d0 * d1 < 0:
            roots.append(float(brentq(lambda a: _hessian_determinant(label, a), a0, a1, xtol=xtol)))
    if dets and dets[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots
