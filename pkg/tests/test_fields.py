import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from constraint_hessian import orthogonal, so3
from constraint_hessian.errors import ContractViolation, ParameterError
from constraint_hessian.fields import (
    ScalarField,
    ambient_hessian,
    constant_field,
    fd_gradient,
    fd_hessian,
    half_norm_squared,
    linear_field,
    quadratic_field,
)

from conftest import x2y_field


def test_half_norm_hessian_is_identity():
    f = half_norm_squared(9)
    x = np.arange(9.0)
    assert np.array_equal(ambient_hessian(f, x), np.eye(9))


def test_power2_hessian_is_k_identity():
    cost = so3.power2_cost(so3.example_samples(0.3))
    x = np.random.default_rng(1).standard_normal(9)
    assert np.array_equal(ambient_hessian(cost, x), 3 * np.eye(9))


def test_x2y_hessian_by_hand():
    f = x2y_field()
    H = ambient_hessian(f, [1.0, 2.0])
    assert np.array_equal(H, [[4.0, 2.0], [2.0, 0.0]])
    assert np.allclose(fd_hessian(f, [1.0, 2.0], 1e-4), H, atol=1e-5)


def test_dimension_mismatch():
    with pytest.raises(ContractViolation):
        ambient_hessian(half_norm_squared(3), np.zeros(4))


def test_christoffel_contraction_matches_loops(rng):
    m = 4
    gamma = rng.standard_normal((m, m, m))
    base = quadratic_field(rng.standard_normal((m, m)), rng.standard_normal(m))
    f = ScalarField(m, base.value, base.gradient, base.hessian, christoffel=lambda x: gamma)
    x = rng.standard_normal(m)
    g = base.gradient(x)
    expected = np.empty((m, m))
    for u in range(m):
        for v in range(m):
            expected[u, v] = base.hessian(x)[u, v] - sum(gamma[w, u, v] * g[w] for w in range(m))
    expected = 0.5 * (expected + expected.T)
    H = ambient_hessian(f, x)
    assert np.allclose(H, expected, atol=1e-13)
    assert np.array_equal(H, H.T)


def test_fd_gradient_examples():
    assert np.array_equal(fd_gradient(constant_field(5, 2.5), np.ones(5), 1e-4), np.zeros(5))
    assert np.allclose(fd_gradient(half_norm_squared(2), [1.0, 2.0], 1e-5), [1.0, 2.0], atol=1e-9)
    cost = so3.power2_cost(so3.example_samples(0.0))
    x = orthogonal.flatten(np.eye(3))
    r = cost_mean = so3.example_samples(0.0).mean_flat
    assert np.allclose(fd_gradient(cost, x), 3 * (x - r), atol=1e-8)
    del cost_mean


def test_fd_hessian_examples():
    assert np.allclose(fd_hessian(linear_field([1.0, -2.0, 3.0]), [0.3, 0.1, 0.2]), 0, atol=1e-7)
    assert np.allclose(fd_hessian(half_norm_squared(9), np.linspace(-1, 1, 9)), np.eye(9), atol=1e-6)


@pytest.mark.parametrize("h", [0.0, -1e-3])
def test_nonpositive_step_rejected(h):
    with pytest.raises(ParameterError):
        fd_gradient(half_norm_squared(2), [0.0, 0.0], h)
    with pytest.raises(ParameterError):
        fd_hessian(half_norm_squared(2), [0.0, 0.0], h)


def test_field_arithmetic(rng):
    a = quadratic_field(np.eye(3), [1.0, 0.0, 0.0])
    b = linear_field([0.0, 2.0, 0.0])
    x = rng.standard_normal(3)
    d = a - b.scaled(0.5)
    assert np.isclose(d.value(x), a.value(x) - 0.5 * b.value(x))
    assert np.allclose(d.gradient(x), a.gradient(x) - 0.5 * b.gradient(x))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=2))
def test_x2y_gradient_matches_fd(p):
    f = x2y_field()
    g = f.gradient(np.array(p))
    assert np.max(np.abs(g - fd_gradient(f, p))) <= 1e-7 * (1 + np.max(np.abs(g)))
