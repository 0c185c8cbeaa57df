import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from constraint_hessian import orthogonal as og
from constraint_hessian import so3
from constraint_hessian.errors import ContractViolation, OffManifoldError, ParameterError
from constraint_hessian.fields import constant_field, random_quadratic
from constraint_hessian.gramian import gramian, restricted_hessian, sigma_multipliers

I3 = np.eye(3)


def alpha0_cost():
    return so3.power2_cost(so3.example_samples(0.0))


def unit(c):
    # same coefficient norm as the basis directions
    return c / np.linalg.norm(c)


def random_skew(n, rng):
    A = rng.standard_normal((n, n))
    return A - A.T


def test_constraint_gradient_and_hessian_o3():
    cs = og.constraint_system(3)
    assert [f.name for f in cs.constraints] == ["F_1", "F_2", "F_3", "F_12", "F_13", "F_23"]
    assert np.allclose(cs.regular_value, [0.5, 0.5, 0.5, 0, 0, 0])
    assert np.array_equal(cs.constraints[3].gradient(og.flatten(I3)), [0, 1, 0, 1, 0, 0, 0, 0, 0])
    H = cs.constraints[5].hessian(np.zeros(9)).reshape(3, 3, 3, 3).transpose(0, 2, 1, 3)
    for r in range(3):
        for c in range(3):
            expected = np.eye(3) if (r, c) in ((1, 2), (2, 1)) else np.zeros((3, 3))
            assert np.array_equal(H[r, c], expected)


@pytest.mark.parametrize("n", [0, 1, 2.5])
def test_constraint_system_rejects_small_n(n):
    with pytest.raises(ParameterError):
        og.constraint_system(n)


def test_orthogonal_point_validation():
    og.OrthogonalPoint.from_matrix(I3)
    with pytest.raises(OffManifoldError):
        og.OrthogonalPoint.from_matrix(2 * I3)
    with pytest.raises(ContractViolation):
        og.OrthogonalPoint(3, np.zeros(8))
    with pytest.raises(ContractViolation):
        og.unflatten(np.zeros(8))


def test_skew_basis_element():
    W = og.SkewBasisElement(1, 3).matrix(3)
    assert np.array_equal(W, -W.T)
    assert og.SkewBasisElement(1, 3).sign == 1 and og.SkewBasisElement(1, 2).sign == -1
    with pytest.raises(ParameterError):
        og.SkewBasisElement(2, 2)
    with pytest.raises(ParameterError):
        og.SkewBasisElement(1, 4).matrix(3)


def test_tangent_basis_at_identity():
    basis = og.tangent_basis(I3)
    assert basis.labels == ("omega_12", "omega_13", "omega_23")
    assert np.array_equal(basis.vectors[0], [0, -1, 0, 1, 0, 0, 0, 0, 0])
    nu = og.nu_basis(I3)
    assert np.array_equal(nu.vectors, basis.vectors[[2, 1, 0]])
    with pytest.raises(ParameterError):
        og.nu_basis(np.eye(4))


def test_omega12_matches_display_formula(rng):
    X = og.random_orthogonal(3, rng)
    expected = np.array([[X[i, 1], -X[i, 0], 0.0] for i in range(3)]).reshape(-1)
    assert np.allclose(og.tangent_basis(X).vectors[0], expected, atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_tangent_basis_orthogonality(rng, n):
    X = og.random_orthogonal(n, rng)
    basis = og.tangent_basis(X)
    grads = og.constraint_system(n).gradients(og.flatten(X))
    assert np.max(np.abs(grads @ basis.matrix)) <= 1e-12
    assert np.allclose(basis.vectors @ basis.vectors.T, 2 * np.eye(basis.dim), atol=1e-12)


def test_sigma_closed_form_examples(rng):
    assert np.allclose(og.sigma_closed_form(constant_field(9, 1.0), I3), 0)
    assert np.allclose(og.sigma_closed_form(alpha0_cost(), I3), [0, 3, 3, 0, 0, 0], atol=1e-14)
    cs = og.constraint_system(3)
    for _ in range(50):
        X = og.random_orthogonal(3, rng)
        cost = random_quadratic(9, rng)
        assert np.allclose(og.sigma_closed_form(cost, X), sigma_multipliers(cs, cost, og.flatten(X)), atol=1e-10)
    with pytest.raises(OffManifoldError):
        og.sigma_closed_form(alpha0_cost(), 1.1 * I3)


def test_gramian_determinant_values(rng):
    assert og.gramian_determinant(np.eye(2)) == 2
    assert og.gramian_determinant(og.random_orthogonal(3, rng)) == 8
    assert og.gramian_determinant(og.random_orthogonal(4, rng)) == 64
    with pytest.raises(OffManifoldError):
        og.gramian_determinant(np.diag([1, 1, 1.1]))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_gramian_entrywise_on_o_n(rng, n):
    cs = og.constraint_system(n)
    d = n * (n - 1) // 2
    target = np.diag(np.concatenate([np.ones(n), 2 * np.ones(d)]))
    for _ in range(20):
        x = og.flatten(og.random_orthogonal(n, rng))
        G = gramian(cs.constraints, cs.constraints, x)
        assert np.max(np.abs(G - target)) <= 1e-10
        assert abs(np.linalg.det(G) - 2.0**d) <= 1e-9 * 2.0**d


def test_restricted_hessian_on_examples():
    assert np.allclose(og.restricted_hessian_on(constant_field(9, 2.0), I3).matrix, 0)
    black = og.restricted_hessian_on(alpha0_cost(), np.diag([-1.0, -1, 1])).permuted(og.NU_ORDER)
    assert np.allclose(black.matrix, [[0, 0, 0], [0, -3, -1], [0, -1, -3]], atol=1e-13)
    with pytest.raises(OffManifoldError):
        og.restricted_hessian_on(alpha0_cost(), 1.1 * I3)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_component_formula_matches_generic_path(rng, n):
    cs = og.constraint_system(n)
    for _ in range(5):
        X = og.random_orthogonal(n, rng)
        cost = random_quadratic(n * n, rng)
        verbatim = og.restricted_hessian_on(cost, X)
        generic = restricted_hessian(cs, cost, og.tangent_basis(X))
        assert np.max(np.abs(verbatim.matrix - generic.matrix)) <= 1e-10
        assert np.allclose(verbatim.multipliers, generic.multipliers, atol=1e-10)


def test_geodesic_examples():
    cost = alpha0_cost()
    assert og.geodesic_second_derivative(constant_field(9, 5.0), I3, og.SkewBasisElement(1, 2)) == 0
    assert abs(og.geodesic_second_derivative(cost, I3, og.SkewBasisElement(2, 3))) <= 1e-5
    # G(t) = const - 3 cos t along Omega_13, so the second derivative is 3
    assert abs(og.geodesic_second_derivative(cost, I3, og.SkewBasisElement(1, 3)) - 3.0) <= 1e-4
    with pytest.raises(ParameterError):
        og.geodesic_second_derivative(cost, I3, og.SkewBasisElement(1, 3), h=0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_geodesic_oracle_agrees_with_component_formula(rng, n):
    samples = so3.RotationSampleSet([og.random_orthogonal(3, rng, special=True) for _ in range(4)])
    costs = [random_quadratic(n * n, rng)]
    if n == 3:
        costs.append(so3.power2_cost(samples))
    pairs = og.skew_pairs(n)
    for cost in costs:
        for _ in range(3):
            X = og.random_orthogonal(n, rng)
            H = og.restricted_hessian_on(cost, X).matrix
            directions = [np.eye(len(pairs))[i] for i in range(len(pairs))]
            directions += [unit(rng.standard_normal(len(pairs))) for _ in range(10)]
            for c in directions:
                fd = og.geodesic_second_derivative(cost, X, og.skew_combination(n, c), h=1e-3)
                assert abs(c @ H @ c - fd) <= 5e-5


def test_matrix_exponential_examples(rng):
    assert np.array_equal(og.matrix_exponential(np.zeros((3, 3))), np.eye(3))
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert np.allclose(og.matrix_exponential(J, np.pi / 2), J, atol=1e-15)
    with pytest.raises(ContractViolation):
        og.matrix_exponential(np.ones((2, 2)))
    with pytest.raises(ContractViolation):
        og.matrix_exponential(np.zeros((2, 3)))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 6), st.floats(-20, 20), st.integers(0, 2**32 - 1))
def test_matrix_exponential_properties(n, t, seed):
    W = random_skew(n, np.random.default_rng(seed))
    E = og.matrix_exponential(W, t)
    scale = max(1.0, abs(t) * np.abs(W).max())
    assert np.max(np.abs(E @ og.matrix_exponential(W, -t) - np.eye(n))) <= 1e-12 * scale
    assert og.orthogonality_error(E) <= 1e-12 * scale
    assert np.allclose(E, expm(t * W), atol=1e-11 * scale)


def test_geodesic_curve_stays_on_manifold(rng):
    for n in (2, 3, 4, 5):
        X = og.random_orthogonal(n, rng)
        W = random_skew(n, rng)
        for t in np.linspace(-1, 1, 21):
            assert og.orthogonality_error(X @ og.matrix_exponential(W, t)) <= 1e-11


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_closed_form_gradients_match_fields(rng, n):
    X = og.random_orthogonal(n, rng)
    assert np.array_equal(og.constraint_gradients(X), og.constraint_system(n).gradients(og.flatten(X)))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_tangent_basis_matches_matrix_products(rng, n):
    X = og.random_orthogonal(n, rng)
    expected = [og.flatten(X @ og.SkewBasisElement(a, b).matrix(n)) for a, b in og.skew_pairs(n)]
    assert np.array_equal(og.tangent_basis(X).vectors, np.array(expected))
