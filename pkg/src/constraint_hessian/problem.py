"""Loading JSON problem files into constraint systems, costs and points.

Three kinds are understood::

    {"kind": "so3-example", "alpha": 0.0, "point": [9 numbers]}
    {"kind": "orthogonal", "n": 3, "point": [...], "cost": {...}}
    {"kind": "generic", "point": [...], "constraints": [...],
     "regular_value": [...], "cost": {...}}

``point`` may be replaced by ``"quaternion": [q0, q1, q2, q3]`` for the
rotation kinds.  Costs are ``{"name": "power2", "samples": [3x3, ...]}`` or
``{"name": "quadratic", "A": [[...]], "b": [...], "c": 0.0}``.  Generic
constraints are quadratics in the same ``{"A", "b", "c"}`` form.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractViolation, OffManifoldError, ParameterError
from .fields import ScalarField, quadratic_field
from .gramian import ConstraintSystem, TangentBasis, null_space_basis
from .orthogonal import OrthogonalPoint, constraint_system, nu_basis, tangent_basis
from .so3 import RotationSampleSet, example_samples, power2_cost, quaternion_to_rotation

KINDS = ("orthogonal", "so3-example", "generic")


class ProblemError(ParameterError):
    """The problem file is malformed or fails validation."""


@dataclass
class Problem:
    kind: str
    constraints: ConstraintSystem
    cost: ScalarField
    point: np.ndarray
    n: Optional[int] = None
    alpha: Optional[float] = None
    samples: Optional[RotationSampleSet] = None
    vector_field: Optional[str] = None

    @property
    def orthogonal_point(self) -> OrthogonalPoint:
        if self.n is None:
            raise ProblemError(f"kind {self.kind!r} has no orthogonal structure")
        return OrthogonalPoint(self.n, self.point)

    def basis(self, name: str = "omega") -> TangentBasis:
        if self.n is None:
            if name not in ("omega", "null"):
                raise ProblemError(f"basis {name!r} is not available for generic problems")
            return null_space_basis(self.constraints, self.point)
        if name == "nu":
            return nu_basis(self.orthogonal_point)
        if name == "omega":
            return tangent_basis(self.orthogonal_point)
        raise ProblemError(f"unknown basis {name!r}")


def _matrix(value, what, shape=None) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemError(f"{what} is not numeric: {exc}") from None
    if shape is not None and arr.shape != shape:
        raise ProblemError(f"{what} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ProblemError(f"{what} contains non-finite values")
    return arr


def _samples(value) -> RotationSampleSet:
    if not isinstance(value, list) or not value:
        raise ProblemError("samples must be a non-empty list of 3x3 matrices")
    mats = [_matrix(R, f"samples[{i}]", (3, 3)) for i, R in enumerate(value)]
    try:
        return RotationSampleSet(tuple(mats))
    except (ContractViolation, ParameterError) as exc:
        raise ProblemError(str(exc)) from None


def _quadratic(spec: dict, dim: int, what: str) -> ScalarField:
    A = _matrix(spec.get("A"), f"{what}.A", (dim, dim))
    b = _matrix(spec.get("b", [0.0] * dim), f"{what}.b", (dim,))
    c = float(spec.get("c", 0.0))
    return quadratic_field(A, b, c, name=what)


def _cost(spec, dim: int, default_samples: Optional[RotationSampleSet]) -> tuple:
    if spec is None:
        if default_samples is None:
            raise ProblemError("missing 'cost'")
        return power2_cost(default_samples), default_samples
    if not isinstance(spec, dict) or "name" not in spec:
        raise ProblemError("'cost' must be an object with a 'name'")
    name = spec["name"]
    if name == "power2":
        if dim != 9:
            raise ProblemError("the power2 cost is defined on O(3)")
        samples = _samples(spec["samples"]) if "samples" in spec else default_samples
        if samples is None:
            raise ProblemError("power2 cost needs 'samples'")
        return power2_cost(samples), samples
    if name == "quadratic":
        return _quadratic(spec, dim, "cost"), None
    raise ProblemError(f"unknown cost {name!r}")


def _rotation_point(data: dict, n: int) -> np.ndarray:
    if "quaternion" in data:
        if n != 3:
            raise ProblemError("'quaternion' requires n = 3")
        q = _matrix(data["quaternion"], "quaternion", (4,))
        try:
            return quaternion_to_rotation(q).reshape(-1)
        except ContractViolation as exc:
            raise ProblemError(str(exc)) from None
    if "point" not in data:
        raise ProblemError("missing 'point'")
    return _matrix(data["point"], "point", (n * n,))


def problem_from_dict(data) -> Problem:
    """Validate a decoded problem file.

    Raises :class:`ProblemError` on schema problems and
    :class:`OffManifoldError` when the point violates the constraints.
    """
    if not isinstance(data, dict):
        raise ProblemError("problem file must contain a JSON object")
    kind = data.get("kind")
    if kind not in KINDS:
        raise ProblemError(f"'kind' must be one of {KINDS}, got {kind!r}")
    vf = data.get("vector_field")
    if vf not in (None, "neg-gradient"):
        raise ProblemError(f"unknown vector_field {vf!r}")

    if kind == "so3-example":
        alpha = data.get("alpha")
        samples = _samples(data["samples"]) if "samples" in data else None
        if samples is None:
            if not isinstance(alpha, (int, float)) or not -np.pi <= alpha <= np.pi:
                raise ProblemError("so3-example needs 'alpha' in [-pi, pi] or explicit 'samples'")
            samples = example_samples(float(alpha))
        point = _rotation_point(data, 3)
        cost, samples = _cost(data.get("cost"), 9, samples)
        OrthogonalPoint(3, point)
        return Problem(kind, constraint_system(3), cost, point, 3,
                       None if alpha is None else float(alpha), samples, vf)

    if kind == "orthogonal":
        n = data.get("n")
        if not isinstance(n, int) or n < 2:
            raise ProblemError("'n' must be an integer >= 2")
        point = _rotation_point(data, n)
        cost, samples = _cost(data.get("cost"), n * n, None)
        OrthogonalPoint(n, point)
        return Problem(kind, constraint_system(n), cost, point, n, None, samples, vf)

    point = _matrix(data.get("point"), "point")
    if point.ndim != 1:
        raise ProblemError("'point' must be a flat list")
    dim = point.shape[0]
    specs = data.get("constraints")
    if not isinstance(specs, list) or not specs:
        raise ProblemError("generic problems need a non-empty 'constraints' list")
    fields = [_quadratic(s, dim, f"constraints[{i}]") for i, s in enumerate(specs)]
    value = _matrix(data.get("regular_value"), "regular_value", (len(fields),))
    try:
        cs = ConstraintSystem(tuple(fields), value)
    except ContractViolation as exc:
        raise ProblemError(str(exc)) from None
    cost, _ = _cost(data.get("cost"), dim, None)
    res = np.max(np.abs(cs.residual(point)))
    if res > 1e-9 * (1.0 + np.max(np.abs(value))):
        raise OffManifoldError(f"point violates the constraints by {res:.3e}")
    return Problem(kind, cs, cost, point, None, None, None, vf)


def load_problem(path) -> Problem:
    """Read and validate a problem file; JSON syntax errors propagate as ``json.JSONDecodeError``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return problem_from_dict(json.loads(text))
