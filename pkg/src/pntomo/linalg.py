"""Small dense linear algebra.

Matrices here are tiny (covariances of a few modes, Fock truncations of a
few hundred levels), so everything is plain numpy/LAPACK with explicit
guards for the degenerate cases the rest of the package has to route around.
"""

import warnings

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotHermitian, SingularMatrix

PIVOT_TOL = 1e-13
HERMITIAN_TOL = 1e-10


def _factor(m, dtype):
    # singular input is reported by the pivot check, not by scipy's warning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        return scipy.linalg.lu_factor(m.astype(dtype), check_finite=True)


def _square(m):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def sym(m):
    """Return the exactly symmetric part ``(m + m.T) / 2`` as a float array."""
    m = _square(np.asarray(m, dtype=float))
    return 0.5 * (m + m.T)


def lu(m):
    """Partial-pivot LU factorisation; raises SingularMatrix on a tiny pivot."""
    m = _square(m)
    dtype = complex if np.iscomplexobj(m) else float
    lu_, piv = _factor(m, dtype)
    pivots = np.abs(np.diag(lu_))
    if pivots.size and pivots.min() < PIVOT_TOL:
        raise SingularMatrix(
            f"pivot magnitude {pivots.min():.3e} below {PIVOT_TOL:g}"
        )
    return lu_, piv


def invert(m):
    """Inverse of a square matrix.

    Raises
    ------
    SingularMatrix
        If elimination meets a pivot smaller than ``PIVOT_TOL``. For
        covariances this typically means ``E - 2 sigma`` at a pure state.
    """
    m = _square(m)
    lu_piv = lu(m)
    eye = np.eye(m.shape[0], dtype=lu_piv[0].dtype)
    return scipy.linalg.lu_solve(lu_piv, eye)


def solve(m, b):
    """Solve ``m x = b`` with the same singularity guard as :func:`invert`."""
    return scipy.linalg.lu_solve(lu(m), np.asarray(b))


def determinant(m):
    """Determinant from a pivoted LU factorisation. Zero is a valid result."""
    m = _square(m)
    if m.shape[0] == 0:
        return 1.0
    dtype = complex if np.iscomplexobj(m) else float
    lu_, piv = _factor(m, dtype)
    # each piv[i] != i is one row swap
    sign = -1.0 if np.count_nonzero(piv != np.arange(len(piv))) % 2 else 1.0
    det = sign * np.prod(np.diag(lu_))
    return det if dtype is complex else float(det)


def hermiticity_residual(m):
    m = _square(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def hermitian_eigenvalues(m, tol=HERMITIAN_TOL):
    """Ascending real eigenvalues of a Hermitian matrix.

    Raises NotHermitian when ``max|m - m^H| > tol``.
    """
    m = _square(m)
    res = hermiticity_residual(m)
    if res > tol:
        raise NotHermitian(f"max|M - M^H| = {res:.3e} exceeds {tol:g}")
    h = 0.5 * (m + m.conj().T)
    return np.linalg.eigvalsh(h)


def hermitian_eigh(m, tol=HERMITIAN_TOL):
    """Eigenvalues and eigenvectors of a Hermitian matrix (ascending)."""
    m = _square(m)
    res = hermiticity_residual(m)
    if res > tol:
        raise NotHermitian(f"max|M - M^H| = {res:.3e} exceeds {tol:g}")
    return np.linalg.eigh(0.5 * (m + m.conj().T))
