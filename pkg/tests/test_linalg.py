import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genpoincare.linalg import (
    as_cmatrix,
    image_projector,
    kernel_complement_projector,
    numeric_rank,
    penrose_residuals,
    pseudo_inverse,
    rank_gap,
    svd,
)
from oracles import full_rank_pinv


def random_matrix(rng, rows, cols, rank=None):
    m = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    if rank is None:
        return m
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    s = rng.uniform(0.5, 4.0, len(s))
    s[rank:] = 0.0
    return (u * s) @ vh


shapes = st.tuples(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**31 - 1))


def test_svd_trivial_cases():
    np.testing.assert_array_equal(svd(np.eye(2)).singular_values, [1.0, 1.0])
    np.testing.assert_array_equal(svd(np.zeros((3, 2))).singular_values, [0.0, 0.0])
    np.testing.assert_allclose(svd(np.diag([3.0, 4.0])).singular_values, [4.0, 3.0])


@given(shapes)
@settings(max_examples=60, deadline=None)
def test_svd_reconstructs(shape):
    rows, cols, seed = shape
    m = random_matrix(np.random.default_rng(seed), rows, cols)
    res = svd(m)
    s = res.singular_values
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
    tol = 1e-12 * s[0] * max(rows, cols)
    assert np.max(np.abs(res.reconstruct() - m)) <= tol
    again = svd(m)
    np.testing.assert_array_equal(again.singular_values, s)


def test_numeric_rank_examples():
    assert numeric_rank(np.eye(3)) == 3
    assert numeric_rank(np.zeros((3, 4))) == 0
    # threshold 2 * eps * 1 ~ 4.4e-16 sits above 1e-16
    assert numeric_rank(np.diag([1.0, 1e-16])) == 1
    assert numeric_rank(np.diag([1.0, 1e-3]), tol=1e-2) == 1


def test_pseudo_inverse_examples():
    np.testing.assert_allclose(pseudo_inverse(np.eye(4)), np.eye(4), atol=1e-15)
    np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]), atol=1e-15)
    # the four Penrose equations for a 2x1 column force (1/2, 1/2)
    np.testing.assert_allclose(pseudo_inverse([[1.0], [1.0]]), [[0.5, 0.5]], atol=1e-15)
    assert pseudo_inverse(np.zeros((2, 3))).shape == (3, 2)


def test_penrose_residuals_examples():
    assert penrose_residuals(np.eye(3), np.eye(3)) == (0.0, 0.0, 0.0, 0.0)
    r = penrose_residuals(np.eye(4), np.zeros((4, 4)))
    assert r[0] == pytest.approx(2.0)
    m = random_matrix(np.random.default_rng(5), 5, 3)
    assert max(penrose_residuals(m, pseudo_inverse(m))) < 1e-10


def test_penrose_residuals_shape_mismatch():
    with pytest.raises(ValueError):
        penrose_residuals(np.eye(3), np.eye(2))


def test_as_cmatrix_rejects_bad_input():
    with pytest.raises(ValueError):
        as_cmatrix([[np.nan]])
    with pytest.raises(ValueError):
        as_cmatrix([1.0, 2.0])


@given(shapes, st.integers(0, 8))
@settings(max_examples=100, deadline=None)
def test_penrose_axioms_hold(shape, rank):
    rows, cols, seed = shape
    m = random_matrix(np.random.default_rng(seed), rows, cols, min(rank, rows, cols))
    res = penrose_residuals(m, pseudo_inverse(m))
    assert max(res) < 1e-10 * (1 + np.linalg.norm(m, 2))


@given(shapes, st.floats(0.01, 100.0), st.booleans())
@settings(max_examples=60, deadline=None)
def test_scaling_law(shape, lam, negative):
    rows, cols, seed = shape
    lam = -lam if negative else lam
    m = random_matrix(np.random.default_rng(seed), rows, cols)
    ref = pseudo_inverse(m)
    assert np.linalg.norm(pseudo_inverse(lam * m) - ref / lam) < 1e-10 * np.linalg.norm(ref)


@given(shapes)
@settings(max_examples=60, deadline=None)
def test_conjugation_symmetry(shape):
    rows, cols, seed = shape
    m = random_matrix(np.random.default_rng(seed), rows, cols)
    np.testing.assert_allclose(pseudo_inverse(np.conj(m)), np.conj(pseudo_inverse(m)), rtol=0, atol=1e-12)


@given(shapes)
@settings(max_examples=40, deadline=None)
def test_matches_normal_equations_on_full_rank(shape):
    rows, cols, seed = shape
    m = random_matrix(np.random.default_rng(seed), rows, cols, min(rows, cols))
    np.testing.assert_allclose(pseudo_inverse(m), full_rank_pinv(m), atol=1e-10)


def test_projector_examples():
    for proj in (image_projector, kernel_complement_projector):
        np.testing.assert_allclose(proj(np.eye(3)), np.eye(3), atol=1e-15)
        np.testing.assert_array_equal(proj(np.zeros((2, 2))), np.zeros((2, 2)))
    np.testing.assert_allclose(image_projector([[1.0, 0.0], [0.0, 0.0]]), np.diag([1.0, 0.0]))


@given(shapes, st.integers(0, 8))
@settings(max_examples=60, deadline=None)
def test_projectors_idempotent_hermitian(shape, rank):
    rows, cols, seed = shape
    m = random_matrix(np.random.default_rng(seed), rows, cols, min(rank, rows, cols))
    for proj in (image_projector(m), kernel_complement_projector(m)):
        assert np.linalg.norm(proj @ proj - proj) < 1e-10
        assert np.linalg.norm(proj - proj.conj().T) < 1e-10
    assert abs(np.trace(image_projector(m)).real - numeric_rank(m)) < 1e-10


def test_uniqueness_of_penrose_solution():
    rng = np.random.default_rng(11)
    for rank in (1, 2, 3):
        m = random_matrix(rng, 5, 4, rank)
        assert rank_gap(m) > 1e6
        ref = pseudo_inverse(m)
        for scale in (1e-6, 1e-8):
            candidate = ref + scale * (rng.standard_normal(ref.shape) + 1j * rng.standard_normal(ref.shape))
            eps = max(penrose_residuals(m, candidate))
            # perturbations that nearly satisfy all four equations stay close
            assert np.linalg.norm(candidate - ref) <= 50.0 * eps
