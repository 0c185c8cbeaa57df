"""Smooth scalar fields on a Euclidean ambient space.

A :class:`ScalarField` bundles a value evaluator with *analytic* gradient and
Hessian evaluators.  Finite differences (:func:`fd_gradient`,
:func:`fd_hessian`) exist only to check those evaluators and are never used
as a fallback.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolation, ParameterError

DEFAULT_GRADIENT_STEP = 1e-5
DEFAULT_HESSIAN_STEP = 1e-4


@dataclass(frozen=True)
class ScalarField:
    """A C^2 function on R^dim with analytic first and second derivatives.

    Parameters
    ----------
    dim : int
        Ambient dimension ``m``.
    value, gradient, hessian : callable
        Evaluators ``x -> float``, ``x -> (m,)`` and ``x -> (m, m)``.
    christoffel : callable, optional
        ``x -> (m, m, m)`` array ``G[w, u, v]`` of Christoffel symbols of the
        ambient metric.  ``None`` means the Euclidean metric.
    name : str
        Label used in reprs and reports.
    """

    dim: int
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    christoffel: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "field"

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ParameterError(f"dim must be a positive integer, got {self.dim!r}")

    def __call__(self, x):
        return float(self.value(check_point(self, x)))

    def scaled(self, factor: float) -> "ScalarField":
        """Return ``factor * self``."""
        return ScalarField(
            self.dim,
            lambda x: factor * self.value(x),
            lambda x: factor * np.asarray(self.gradient(x), dtype=float),
            lambda x: factor * np.asarray(self.hessian(x), dtype=float),
            self.christoffel,
            f"{factor!r}*{self.name}",
        )

    def __add__(self, other: "ScalarField") -> "ScalarField":
        if not isinstance(other, ScalarField):
            return NotImplemented
        if other.dim != self.dim:
            raise ContractViolation(f"cannot add fields on R^{self.dim} and R^{other.dim}")
        return ScalarField(
            self.dim,
            lambda x: self.value(x) + other.value(x),
            lambda x: np.asarray(self.gradient(x), float) + np.asarray(other.gradient(x), float),
            lambda x: np.asarray(self.hessian(x), float) + np.asarray(other.hessian(x), float),
            self.christoffel,
            f"({self.name} + {other.name})",
        )

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        return self + other.scaled(-1.0)


def check_point(field: ScalarField, x) -> np.ndarray:
    """Return ``x`` as a float vector, raising if its length is not ``field.dim``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != field.dim:
        raise ContractViolation(
            f"point of shape {x.shape} does not match ambient dimension {field.dim} of {field.name}"
        )
    return x


def ambient_hessian(field: ScalarField, x) -> np.ndarray:
    """Covariant Hessian of ``field`` at ``x`` in ambient coordinates.

    Returns the second partials minus the Christoffel contraction
    ``G[w, u, v] * dG/dx^w`` when the field carries a connection, symmetrized
    in ``(u, v)``.
    """
    x = check_point(field, x)
    hess = np.array(field.hessian(x), dtype=float)
    if field.christoffel is not None:
        gamma = np.asarray(field.christoffel(x), dtype=float)
        hess = hess - np.einsum("wuv,w->uv", gamma, np.asarray(field.gradient(x), dtype=float))
    return 0.5 * (hess + hess.T)


def fd_gradient(field: ScalarField, x, h: float = DEFAULT_GRADIENT_STEP) -> np.ndarray:
    """Central-difference gradient of ``field.value`` at ``x``."""
    if not h > 0:
        raise ParameterError(f"step h must be positive, got {h!r}")
    x = check_point(field, x)
    grad = np.empty(field.dim)
    for u in range(field.dim):
        e = np.zeros(field.dim)
        e[u] = h
        grad[u] = (field.value(x + e) - field.value(x - e)) / (2.0 * h)
    return grad


def fd_hessian(field: ScalarField, x, h: float = DEFAULT_HESSIAN_STEP) -> np.ndarray:
    """Second-order central-difference Hessian of ``field.value`` at ``x``.

    Uses the three-point stencil on the diagonal and the four-point cross
    stencil off it; the result is symmetrized.
    """
    if not h > 0:
        raise ParameterError(f"step h must be positive, got {h!r}")
    x = check_point(field, x)
    m = field.dim
    f0 = field.value(x)
    steps = np.eye(m) * h
    hess = np.empty((m, m))
    for u in range(m):
        eu = steps[u]
        hess[u, u] = (field.value(x + eu) - 2.0 * f0 + field.value(x - eu)) / h**2
        for v in range(u + 1, m):
            ev = steps[v]
            hess[u, v] = (
                field.value(x + eu + ev)
                - field.value(x + eu - ev)
                - field.value(x - eu + ev)
                + field.value(x - eu - ev)
            ) / (4.0 * h**2)
            hess[v, u] = hess[u, v]
    return 0.5 * (hess + hess.T)


# -- shipped fields ---------------------------------------------------------

def constant_field(dim: int, c: float = 0.0) -> ScalarField:
    return ScalarField(
        dim,
        lambda x: float(c),
        lambda x: np.zeros(dim),
        lambda x: np.zeros((dim, dim)),
        name=f"constant({c!r})",
    )


def linear_field(b) -> ScalarField:
    """``x -> <b, x>``."""
    b = np.asarray(b, dtype=float)
    dim = b.shape[0]
    return ScalarField(
        dim,
        lambda x: float(b @ x),
        lambda x: b.copy(),
        lambda x: np.zeros((dim, dim)),
        name="linear",
    )


def quadratic_field(A, b=None, c: float = 0.0, name: str = "quadratic") -> ScalarField:
    """``x -> 1/2 x^T A x + b^T x + c`` with ``A`` symmetrized on input."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractViolation(f"A must be square, got shape {A.shape}")
    A = 0.5 * (A + A.T)
    dim = A.shape[0]
    b = np.zeros(dim) if b is None else np.asarray(b, dtype=float)
    if b.shape != (dim,):
        raise ContractViolation(f"b must have shape ({dim},), got {b.shape}")
    return ScalarField(
        dim,
        lambda x: float(0.5 * x @ A @ x + b @ x + c),
        lambda x: A @ x + b,
        lambda x: A.copy(),
        name=name,
    )


def half_norm_squared(dim: int) -> ScalarField:
    """``x -> 1/2 |x|^2``."""
    return quadratic_field(np.eye(dim), name="half_norm_squared")


def random_quadratic(dim: int, rng: np.random.Generator, scale: float = 1.0) -> ScalarField:
    """A quadratic field with standard-normal symmetric ``A`` and ``b``."""
    A = rng.standard_normal((dim, dim)) * scale
    b = rng.standard_normal(dim) * scale
    return quadratic_field(A + A.T, b, name="random_quadratic")
