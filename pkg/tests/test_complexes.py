import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genpoincare import operators
from genpoincare.complexes import (
    ComplexSpec,
    NotEllipticError,
    check_structure,
    completion_search,
    complex_from_completion,
    compose_condition,
    ellipticity_constant,
    exactness_at,
    laplace_beltrami_symbol,
)
from genpoincare.symbol import Operator, sphere_samples, symbol_at

de_rham_2 = ComplexSpec(operators.gradient(2), operators.curl_2d())
de_rham_3 = ComplexSpec(operators.gradient(3), operators.curl_3d())
de_rham_3_mid = ComplexSpec(operators.curl_3d(), operators.divergence(3))
elliptic_cases = [de_rham_2, de_rham_3, de_rham_3_mid]


def perturbed(spec, index, delta):
    b = np.array(spec.q_op.coeffs)
    b[index] += delta
    return ComplexSpec(spec.p_op, Operator(b))


def test_shape_validation():
    with pytest.raises(ValueError):
        ComplexSpec(operators.gradient(2), operators.curl_3d())
    with pytest.raises(ValueError):
        ComplexSpec(operators.gradient(3), operators.curl_2d())


def test_compose_condition_examples(sym_grad):
    assert compose_condition(de_rham_2) == 0.0
    assert compose_condition(ComplexSpec(sym_grad, operators.zero(2, 3, 2))) == 0.0
    # B_2 = (-1 + delta, 0) only disturbs B_1 A_2 + B_2 A_1 = delta
    for delta in (1e-3, -0.25):
        assert compose_condition(perturbed(de_rham_2, (1, 0, 0), delta)) == pytest.approx(abs(delta), rel=1e-12)


def test_exactness_examples(sym_grad):
    assert exactness_at(de_rham_2, [1.0, 0.0])
    assert not exactness_at(ComplexSpec(sym_grad, operators.zero(2, 3, 2)), [0.6, 0.8])
    # P = 0 into V = R: exact iff Q(xi) has trivial kernel on R
    q_injective = Operator.from_matrices([[[1.0]], [[0.0]]])
    assert exactness_at(ComplexSpec(operators.zero(2, 1, 1), q_injective), [1.0, 0.0])
    assert not exactness_at(ComplexSpec(operators.zero(2, 1, 1), q_injective), [0.0, 1.0])
    with pytest.raises(ValueError):
        exactness_at(de_rham_2, [0.0, 0.0])


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_exactness_scale_invariant(seed):
    rng = np.random.default_rng(seed)
    for spec in elliptic_cases + [ComplexSpec(operators.symmetric_gradient_2d(), operators.zero(2, 3, 1))]:
        xi = rng.standard_normal(spec.n)
        assert exactness_at(spec, xi) == exactness_at(spec, 2.0 * xi)


def test_check_structure_golden():
    for spec, ranks in ((de_rham_2, (1, 1)), (de_rham_3, (1, 2)), (de_rham_3_mid, (2, 1))):
        rep = check_structure(spec, sphere_samples(spec.n, 300, 0))
        assert rep.verdict
        assert (rep.cond_rank_p.min_rank, rep.cond_rank_q.min_rank) == ranks


def test_single_sign_flip_breaks_structure():
    for spec in (de_rham_2, de_rham_3):
        b = spec.q_op.coeffs
        for index in zip(*np.nonzero(b)):
            flipped = perturbed(spec, index, -2.0 * b[index])
            assert not check_structure(flipped, sphere_samples(spec.n, 100, 0)).verdict


def test_check_structure_rejects_nonzero_q_for_symmetric_gradient(sym_grad):
    rng = np.random.default_rng(0)
    for _ in range(5):
        q = Operator(rng.standard_normal((2, 2, 3)))
        rep = check_structure(ComplexSpec(sym_grad, q), sphere_samples(2, 50, 0))
        assert rep.cond_compose > 0.0
        assert not rep.verdict


def test_laplace_beltrami_examples(grad2):
    for xi in ([1.0, 0.0], [0.3, -2.0]):
        xi = np.array(xi)
        np.testing.assert_allclose(laplace_beltrami_symbol(de_rham_2, xi), (xi @ xi) * np.eye(2), atol=1e-15)
    assert np.all(laplace_beltrami_symbol(de_rham_2, [0.0, 0.0]) == 0)
    no_q = ComplexSpec(grad2, operators.zero(2, 2, 1))
    xi = np.array([1.0, 2.0])
    lmat = laplace_beltrami_symbol(no_q, xi)
    np.testing.assert_allclose(lmat, np.outer(xi, xi), atol=1e-15)
    assert np.linalg.matrix_rank(lmat) == 1


@given(st.integers(0, 10**6), st.floats(0.05, 20))
@settings(max_examples=30, deadline=None)
def test_laplace_beltrami_properties(seed, lam):
    rng = np.random.default_rng(seed)
    for spec in elliptic_cases + [ComplexSpec(operators.symmetric_gradient_2d(), Operator(rng.standard_normal((2, 2, 3))))]:
        xi = rng.standard_normal(spec.n)
        lmat = laplace_beltrami_symbol(spec, xi)
        assert np.max(np.abs(lmat - lmat.conj().T)) < 1e-12
        assert np.linalg.eigvalsh(lmat).min() >= -1e-12
        np.testing.assert_allclose(laplace_beltrami_symbol(spec, lam * xi), lam**2 * lmat,
                                   atol=1e-10 * max(1.0, lam**2 * np.abs(lmat).max()))


def test_ellipticity_constant_examples():
    samples2, samples3 = sphere_samples(2, 200, 0), sphere_samples(3, 200, 0)
    assert ellipticity_constant(de_rham_2, samples2) == pytest.approx(1.0, abs=1e-9)
    assert ellipticity_constant(de_rham_3, samples3) == pytest.approx(1.0, abs=1e-9)
    assert ellipticity_constant(de_rham_3.scaled(2.0), samples3) == pytest.approx(0.25, abs=1e-9)
    with pytest.raises(NotEllipticError) as info:
        ellipticity_constant(ComplexSpec(operators.gradient(2), operators.zero(2, 2, 1)), samples2)
    assert len(info.value.witness) == 2


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_ellipticity_estimate_off_sphere(seed):
    rng = np.random.default_rng(seed)
    spec = ComplexSpec(operators.cauchy_riemann(), operators.zero(2, 2, 1))
    c = ellipticity_constant(spec, sphere_samples(2, 400, 1))
    for xi in rng.standard_normal((100, 2)) * rng.uniform(0.1, 10, (100, 1)):
        inv_norm = np.linalg.norm(np.linalg.inv(laplace_beltrami_symbol(spec, xi)), 2)
        assert inv_norm <= (c + 1e-9) / (xi @ xi)


def test_completion_search_examples(sym_grad, grad2):
    assert completion_search(sym_grad, 2).shape == (0, 2, 2, 3)
    assert completion_search(sym_grad, 1).shape[0] == 0
    basis = completion_search(grad2, 1)
    assert basis.shape == (1, 2, 1, 2)
    curl = operators.curl_2d().coeffs / np.sqrt(2)
    assert min(np.abs(basis[0] - curl).max(), np.abs(basis[0] + curl).max()) < 1e-12
    full = completion_search(operators.zero(2, 2, 3), 2)
    assert full.shape[0] == 2 * 2 * 3


def test_completion_basis_annihilates_p():
    rng = np.random.default_rng(1)
    for op, dim_w in ((operators.gradient(3), 3), (operators.curl_3d(), 1), (operators.gradient(2), 2)):
        basis = completion_search(op, dim_w)
        assert basis.shape[0] > 0
        gram = basis.reshape(len(basis), -1) @ basis.reshape(len(basis), -1).T
        np.testing.assert_allclose(gram, np.eye(len(basis)), atol=1e-12)
        for b in basis:
            spec = complex_from_completion(op, b)
            assert compose_condition(spec) < 1e-12
            for xi in rng.standard_normal((100, op.n)):
                assert np.linalg.norm(symbol_at(spec.q_op, xi) @ symbol_at(op, xi)) < 1e-10


def test_div_completes_curl():
    basis = completion_search(operators.curl_3d(), 1)
    assert basis.shape[0] == 1
    rep = check_structure(complex_from_completion(operators.curl_3d(), basis[0]), sphere_samples(3, 200, 0))
    assert rep.verdict
