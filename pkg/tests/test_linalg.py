import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pntomo import linalg
from pntomo.errors import DimensionMismatch, NotHermitian, SingularMatrix

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(arrays(float, (4, 4), elements=finite))
def test_inverse_round_trip(m):
    m = m + 5 * np.eye(4)  # diagonally dominant, well conditioned
    inv = linalg.invert(m)
    assert np.allclose(m @ inv, np.eye(4), atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(arrays(float, (3, 3), elements=finite))
def test_determinant_matches_numpy(m):
    assert linalg.determinant(m) == pytest.approx(np.linalg.det(m), abs=1e-9)


def test_determinant_sign_with_row_swaps():
    perm = np.eye(3)[[1, 0, 2]]
    assert linalg.determinant(perm) == pytest.approx(-1.0)
    assert linalg.determinant(np.zeros((2, 2))) == 0.0


def test_singular_matrix_raises():
    with pytest.raises(SingularMatrix):
        linalg.invert(np.array([[1.0, 2.0], [2.0, 4.0]]))
    # E - 2 sigma for the vacuum
    with pytest.raises(SingularMatrix):
        linalg.solve(np.eye(2) - 2 * 0.5 * np.eye(2), np.ones(2))


def test_non_square_rejected():
    with pytest.raises(DimensionMismatch):
        linalg.determinant(np.ones((2, 3)))


def test_complex_solve():
    m = np.array([[2, 1j], [-1j, 3]])
    b = np.array([1, 1j])
    assert np.allclose(m @ linalg.solve(m, b), b)


def test_hermitian_eigenvalues():
    h = np.array([[2, 1 - 1j], [1 + 1j, 3]])
    assert np.allclose(linalg.hermitian_eigenvalues(h), np.linalg.eigvalsh(h))
    with pytest.raises(NotHermitian):
        linalg.hermitian_eigenvalues(np.array([[1, 2], [0, 1]]))


def test_hermiticity_residual():
    m = np.array([[1, 2], [2.5, 0]])
    assert linalg.hermiticity_residual(m) == pytest.approx(0.5)
    assert np.array_equal(linalg.sym(m), np.array([[1, 2.25], [2.25, 0]]))
