"""Hermite polynomials of several variables.

The family ``H^{R}_n(y)`` is defined by the generating function

    exp(-x R x^T / 2 + y R x^T) = sum_n  x^n / n!  H^{R}_n(y)

with ``R`` complex symmetric. Differentiating the left side gives the
recurrence used here,

    H_{m + e_j} = z_j H_m - sum_k R_jk m_k H_{m - e_k},     z = R y,

which needs ``y`` only through ``z``. Storing ``z`` keeps the evaluation
finite when ``R -> 0`` and ``y`` diverges (pure coherent states).
"""

from dataclasses import dataclass
import itertools
import math

import numpy as np

from .errors import DegreeCapExceeded, DimensionMismatch

DEGREE_CAP = 64


@dataclass(frozen=True)
class HermiteParams:
    """Symmetric matrix ``R`` and linear argument ``z = R y``."""

    R: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        R = np.atleast_2d(np.asarray(self.R, dtype=complex))
        if R.shape[0] != R.shape[1]:
            raise DimensionMismatch(f"R must be square, got {R.shape}")
        z = np.asarray(self.z, dtype=complex)
        if z.shape[:1] != (R.shape[0],):
            raise DimensionMismatch(
                f"z leading dimension {z.shape[:1]} does not match R {R.shape}"
            )
        object.__setattr__(self, "R", 0.5 * (R + R.T))
        object.__setattr__(self, "z", z)

    @classmethod
    def from_y(cls, R, y):
        R = np.asarray(R, dtype=complex)
        return cls(R, 0.5 * (R + R.T) @ np.asarray(y, dtype=complex))

    @property
    def dim(self):
        return self.R.shape[0]


def _check_index(n, dim, cap):
    n = tuple(int(k) for k in n)
    if len(n) != dim:
        raise DimensionMismatch(f"index has {len(n)} entries, expected {dim}")
    if any(k < 0 for k in n):
        raise ValueError(f"index entries must be nonnegative: {n}")
    if cap is not None and sum(n) > cap:
        raise DegreeCapExceeded(sum(n), cap, n)
    return n


def hermite_table(R, z, n, cap=DEGREE_CAP):
    """All ``H_m`` for ``0 <= m <= n`` componentwise.

    Parameters
    ----------
    R : (M, M) array_like
        Complex symmetric matrix.
    z : array_like, shape (M,) or (M, *batch)
        ``R y``. Extra trailing axes are evaluated in one pass.
    n : sequence of int
        Upper corner of the index box.
    cap : int or None
        Maximum allowed ``sum(n)``.

    Returns
    -------
    ndarray of shape ``(n_1 + 1, ..., n_M + 1, *batch)``
    """
    params = HermiteParams(R, z)
    R, z = params.R, params.z
    n = _check_index(n, params.dim, cap)
    batch = z.shape[1:]
    table = np.zeros(tuple(k + 1 for k in n) + batch, dtype=complex)
    # Whole lines along axis 0 are filled at once; the loop runs over the
    # remaining axes in lexicographic order so every dependency exists.
    m0 = np.arange(n[0] + 1).reshape((-1,) + (1,) * len(batch))
    line0 = table[(slice(None),) + (0,) * (len(n) - 1)]
    line0[0] = 1.0
    for k in range(n[0]):
        line0[k + 1] = z[0] * line0[k]
        if k:
            line0[k + 1] -= R[0, 0] * k * line0[k - 1]
    tmp = np.empty_like(line0)
    for rest in itertools.product(*(range(k + 1) for k in n[1:])):
        j = next((i for i, v in enumerate(rest) if v), None)
        if j is None:
            continue
        prev = list(rest)
        prev[j] -= 1
        src = table[(slice(None),) + tuple(prev)]
        dest = table[(slice(None),) + tuple(rest)]
        np.multiply(z[j + 1], src, out=dest)
        if R[j + 1, 0] != 0 and n[0]:
            np.multiply(src[:-1], m0[1:] * R[j + 1, 0], out=tmp[1:])
            dest[1:] -= tmp[1:]
        for k, mk in enumerate(prev):
            if mk and R[j + 1, k + 1] != 0:
                lower = list(prev)
                lower[k] -= 1
                np.multiply(table[(slice(None),) + tuple(lower)], R[j + 1, k + 1] * mk, out=tmp)
                dest -= tmp
    return table


def hermite_eval(params, n, cap=DEGREE_CAP):
    """Single value ``H^{R}_n(y)`` for ``params = HermiteParams(R, R y)``."""
    n = _check_index(n, params.dim, cap)
    return hermite_table(params.R, params.z, n, cap=cap)[n]


def hermite_phys(n, x):
    """Physicists' Hermite polynomial ``H_n(x)`` for real or complex ``x``."""
    x = np.asarray(x)
    h_prev = np.ones_like(x, dtype=np.result_type(x, float))
    if n == 0:
        return h_prev
    h = 2 * x * h_prev
    for k in range(1, n):
        h_prev, h = h, 2 * x * h - 2 * k * h_prev
    return h


def generating_function(R, y, x):
    """``exp(-x R x^T / 2 + y R x^T)`` evaluated at points ``x`` of shape (..., M)."""
    R = np.asarray(R, dtype=complex)
    y = np.asarray(y, dtype=complex)
    x = np.asarray(x, dtype=complex)
    quad = np.einsum("...i,ij,...j->...", x, R, x)
    lin = x @ (R.T @ y)
    return np.exp(-0.5 * quad + lin)


def series_coefficients(R, y, n, radius=0.5, points=None):
    """Taylor coefficients of the generating function by ring sampling.

    Samples the generating function on a torus ``|x_k| = radius`` and
    recovers ``H_m`` for all ``m <= n`` with an M-dimensional FFT. The
    method is independent of the recurrence and is only meant for tests.
    """
    R = np.asarray(R, dtype=complex)
    M = R.shape[0]
    n = tuple(int(k) for k in n)
    if len(n) != M:
        raise DimensionMismatch(f"index has {len(n)} entries, expected {M}")
    if points is None:
        top = max(n, default=0)
        points = max(2 * top + 12, 24) if M <= 3 else max(top + 14, 20)
    roots = radius * np.exp(2j * np.pi * np.arange(points) / points)
    mesh = np.meshgrid(*([roots] * M), indexing="ij")
    x = np.stack(mesh, axis=-1)
    values = generating_function(R, y, x)
    coeffs = np.fft.fftn(values) / points**M
    sl = tuple(slice(0, k + 1) for k in n)
    coeffs = coeffs[sl]
    # c_m = H_m / (m! radius^|m|)
    scale = np.ones(coeffs.shape)
    for axis, k in enumerate(n):
        m = np.arange(k + 1)
        f = np.array([math.factorial(i) for i in m], dtype=float) / radius**m
        shape = [1] * M
        shape[axis] = k + 1
        scale = scale * f.reshape(shape)
    return coeffs * scale


def hermite_series_oracle(R, y, n, h=0.5, max_degree=6):
    """``H^{R}_n(y)`` extracted directly from the generating function.

    ``h`` is the sampling radius; comparing two radii gives a self-check.
    """
    n = tuple(int(k) for k in n)
    if sum(n) > max_degree:
        raise DegreeCapExceeded(sum(n), max_degree, n)
    return series_coefficients(R, y, n, radius=h)[n]
