"""Photon-number tomograms of Gaussian states.

``omega(n, alpha) = <n| D(alpha) rho D(alpha)^+ |n>`` is the photon
statistics of the state after shifting its quadrature means by
``sqrt(2) (Re alpha, Im alpha)``. For a Gaussian state it equals

    P0(alpha) * H^{R}_{n n}(y, y*) / (n_1! ... n_N!)

with a Hermite polynomial of 2N variables. The production path uses the
matrix forms

    R  = U^+ (E - 2 sigma) (E + 2 sigma)^{-1} U^*
    z  = R y = 2 U^+ (E + 2 sigma)^{-1} (u, v)^T
    P0 = det(sigma + E/2)^{-1/2} exp[-(u, v) (2 sigma + E)^{-1} (u, v)^T]

where ``u = <p> + sqrt(2) Im alpha`` and ``v = <q> + sqrt(2) Re alpha``.
``z`` is computed without ``(E - 2 sigma)^{-1}``, which does not exist for
pure states.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import linalg
from .errors import (
    ComplexTomogram,
    DegreeCapExceeded,
    DimensionMismatch,
    InvalidSqueezeParams,
    SingularMatrix,
)
from .gaussian import P_FIRST
from .hermite import DEGREE_CAP, hermite_phys, hermite_table

# Hermite index layout: position k pairs with N + k ("block"); the
# alternative is (k, k') adjacent ("interleaved").
PAIRING = "block"

IMAG_REL_TOL = 1e-9
IMAG_ABS_TOL = 1e-14
CLAMP_TOL = 1e-12


def transform_matrix(modes):
    """``U = [[-i E, i E], [E, E]] / sqrt(2)`` of size 2N."""
    eye = np.eye(modes)
    return np.block([[-1j * eye, 1j * eye], [eye, eye]]) / np.sqrt(2)


def _pair_perm(modes):
    """Permutation taking block-paired Hermite variables to PAIRING order."""
    if PAIRING == "block":
        return np.arange(2 * modes)
    return np.ravel(np.column_stack([np.arange(modes), np.arange(modes, 2 * modes)]))


def _uv(state, alphas):
    """Stacked ``(u, v)`` vectors, shape (2N, B) for alphas of shape (B, N)."""
    u = state.mean_p[:, None] + np.sqrt(2) * alphas.imag.T
    v = state.mean_q[:, None] + np.sqrt(2) * alphas.real.T
    return np.concatenate([u, v]) if P_FIRST else np.concatenate([v, u])


def _as_alphas(alpha, modes):
    """Normalise a displacement argument to shape (B, N); second value: was it a single point."""
    a = np.asarray(alpha, dtype=complex)
    single = a.ndim <= 1
    a = np.atleast_1d(a)
    if single:
        a = a.reshape(1, -1)
    if a.shape[-1] != modes:
        raise DimensionMismatch(f"displacement has {a.shape[-1]} entries, state has {modes} modes")
    return a, single


@dataclass(frozen=True)
class TomogramKernel:
    """Hermite matrix ``R``, linear argument ``z = R y`` and vacuum probability ``p0``.

    ``z`` has shape (2N,) for a single displacement or (2N, B) for a batch,
    and ``p0`` is a scalar or shape (B,) accordingly.
    """

    R: np.ndarray
    z: np.ndarray
    p0: object
    modes: int
    scalars: tuple = None  # (T, d, L) for one mode


def _covariance_pieces(state):
    E = np.eye(2 * state.modes)
    plus_inv = linalg.invert(E + 2 * state.sigma)
    U = transform_matrix(state.modes)
    R = U.conj().T @ (E - 2 * state.sigma) @ plus_inv @ U.conj()
    det = linalg.determinant(state.sigma + 0.5 * E)
    if det <= 0:
        raise SingularMatrix(f"det(sigma + E/2) = {det:.3e} is not positive")
    return U, plus_inv, R, 1.0 / np.sqrt(det)


def build_kernel(state, alpha):
    """Kernel for one displacement vector or a batch of shape (B, N)."""
    alphas, single = _as_alphas(alpha, state.modes)
    U, plus_inv, R, pref = _covariance_pieces(state)
    w = _uv(state, alphas)
    z = 2 * U.conj().T @ plus_inv @ w
    p0 = pref * np.exp(-np.einsum("ib,ij,jb->b", w, plus_inv, w))
    perm = _pair_perm(state.modes)
    R = R[np.ix_(perm, perm)]
    z = z[perm]
    scalars = one_mode_scalars(state) if state.modes == 1 else None
    if single:
        return TomogramKernel(R, z[:, 0], float(p0[0]), state.modes, scalars)
    return TomogramKernel(R, z, p0, state.modes, scalars)


def one_mode_scalars(state):
    """``T``, ``d`` and ``L = 1 + 2T + 4d`` of a one-mode covariance."""
    b = state.mode_block(0)
    T = b[0, 0] + b[1, 1]
    d = b[0, 0] * b[1, 1] - b[0, 1] ** 2
    return T, d, 1 + 2 * T + 4 * d


def one_mode_literal(state, alpha):
    """Hand-reduced one-mode ``(R, y, P0)``; reference path for tests only.

    Uses the scalar formulas written in terms of ``T``, ``d`` and ``L``;
    ``y`` carries the denominator ``2T - 4d - 1`` and diverges at pure states.
    """
    if state.modes != 1:
        raise DimensionMismatch("one-mode formulas need a one-mode state")
    b = state.mode_block(0)
    spp, spq, sqq = b[0, 0], b[0, 1], b[1, 1]
    T, d, L = one_mode_scalars(state)
    R = np.array(
        [[2 * (spp - sqq - 2j * spq), 1 - 4 * d],
         [1 - 4 * d, 2 * (spp - sqq + 2j * spq)]]
    ) / L
    alpha = complex(np.asarray(alpha).ravel()[0])
    mq, mp = state.mean_q[0], state.mean_p[0]
    denom = 2 * T - 4 * d - 1
    y1 = np.sqrt(2) / denom * (
        (mq - 1j * mp + np.sqrt(2) * alpha.conjugate()) * (T - 1)
        + (spp - sqq + 2j * spq) * (mq + 1j * mp + np.sqrt(2) * alpha)
    )
    u = mp + np.sqrt(2) * alpha.imag
    v = mq + np.sqrt(2) * alpha.real
    p0 = (
        2 / np.sqrt(L)
        * np.exp(-((2 * sqq + 1) * u**2 + (2 * spp + 1) * v**2) / L)
        * np.exp(4 * spq * u * v / L)
    )
    return R, np.array([y1, np.conj(y1)]), p0


def literal_argument(state, alpha):
    """Hermite argument ``y = 2 U^T (E - 2 sigma)^{-1} (u, v)^T``.

    Raises SingularMatrix for pure states; production code never needs it.
    """
    alphas, _ = _as_alphas(alpha, state.modes)
    E = np.eye(2 * state.modes)
    U = transform_matrix(state.modes)
    w = _uv(state, alphas)[:, 0]
    return 2 * U.T @ linalg.solve(E - 2 * state.sigma, w)


def _factorial_grid(n_box):
    """Product of factorials ``n_1! ... n_N!`` on the index box."""
    grids = np.meshgrid(*[np.arange(k + 1) for k in n_box], indexing="ij")
    out = np.ones(grids[0].shape)
    for g in grids:
        out = out * np.vectorize(math.factorial, otypes=[float])(g)
    return out


def _diag_hermite(kernel, n_box, cap):
    """``H_{m m}`` for every ``m <= n_box``; shape n_box + 1 (+ batch)."""
    N = kernel.modes
    doubled = [0] * (2 * N)
    # where block variable k ended up after the PAIRING permutation
    pos = np.argsort(_pair_perm(N))
    for k in range(N):
        doubled[pos[k]] = n_box[k]
        doubled[pos[N + k]] = n_box[k]
    if cap is not None and sum(doubled) > cap:
        raise DegreeCapExceeded(sum(doubled), cap, tuple(n_box))
    table = hermite_table(kernel.R, kernel.z, doubled, cap=None)
    idx = np.meshgrid(*[np.arange(k + 1) for k in n_box], indexing="ij")
    full = [None] * (2 * N)
    for k in range(N):
        full[pos[k]] = idx[k]
        full[pos[N + k]] = idx[k]
    return table[tuple(full)]


def _real_part(values, what="tomogram"):
    re, im = values.real, values.imag
    bad = np.abs(im) > IMAG_REL_TOL * np.abs(re) + IMAG_ABS_TOL
    if np.any(bad):
        worst = np.max(np.abs(im[bad]))
        raise ComplexTomogram(f"{what} has imaginary part {worst:.3e}")
    return re


def tomogram_table(state, alpha, n_box, cap=DEGREE_CAP):
    """Raw tomogram values for all ``n <= n_box`` (componentwise).

    Returns an array of shape ``(n_1 + 1, ..., n_N + 1)`` for a single
    displacement or ``(..., B)`` for a batch of shape (B, N). Values are not
    clamped, so invalid covariances show their negative entries.
    """
    n_box = tuple(int(k) for k in np.atleast_1d(n_box))
    if len(n_box) != state.modes:
        raise DimensionMismatch(f"index has {len(n_box)} entries, state has {state.modes} modes")
    alphas, single = _as_alphas(alpha, state.modes)
    if single:
        return _table_chunk(state, alphas[0], n_box, cap)
    # bound the Hermite table (2N axes + batch) to ~2e7 complex entries
    per_alpha = np.prod([(k + 1) ** 2 for k in n_box])
    chunk = max(1, int(2e7 // per_alpha))
    parts = [
        _table_chunk(state, alphas[i:i + chunk], n_box, cap)
        for i in range(0, len(alphas), chunk)
    ]
    return np.concatenate(parts, axis=-1)


def _table_chunk(state, alpha, n_box, cap):
    kernel = build_kernel(state, alpha)
    H = _diag_hermite(kernel, n_box, cap)
    fact = _factorial_grid(n_box)
    p0 = np.asarray(kernel.p0)
    if p0.ndim:
        vals = p0 * H / fact[..., None]
    else:
        vals = p0 * H / fact
    return _real_part(vals)


def tomogram_value(state, n, alpha, cap=DEGREE_CAP, raw=False):
    """``omega(n, alpha)`` for one photon-number vector and one displacement.

    Valid-state roundoff in ``(-1e-12, 0)`` is reported as 0 unless ``raw``.
    """
    n = tuple(int(k) for k in np.atleast_1d(n))
    if any(k < 0 for k in n):
        raise ValueError(f"photon numbers must be nonnegative: {n}")
    table = tomogram_table(state, alpha, n, cap=cap)
    val = float(table[n])
    if not raw and -CLAMP_TOL < val < 0:
        return 0.0
    return val


def coherent_tomogram(gamma, n, alpha):
    """Closed form for ``|gamma>``: product of Poisson laws with mean ``|gamma + alpha|^2``."""
    gamma = np.atleast_1d(np.asarray(gamma, dtype=complex))
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    n = np.atleast_1d(np.asarray(n, dtype=int))
    if not (gamma.shape == alpha.shape == n.shape):
        raise DimensionMismatch("gamma, alpha and n must have one entry per mode")
    out = 1.0
    for g, a, k in zip(gamma, alpha, n):
        mu = abs(g + a) ** 2
        if mu == 0.0:
            out *= 1.0 if k == 0 else 0.0
        else:
            out *= math.exp(k * math.log(mu) - mu - math.lgamma(k + 1))
    return out


def squeeze_params(state):
    """``(r, theta)`` with ``cosh 2r = T`` and ``sin theta = 2 s_pq / sqrt(T^2 - 1)``.

    ``cos theta`` takes the sign of ``s_pp - s_qq``.
    """
    b = state.mode_block(0)
    T = b[0, 0] + b[1, 1]
    if T < 1 - 1e-12:
        raise InvalidSqueezeParams(f"trace {T:.6g} < 1 has no real squeezing parameter")
    r = 0.5 * np.arccosh(max(T, 1.0))
    if r == 0.0:
        return 0.0, 0.0
    s = 2 * b[0, 1] / np.sqrt(T * T - 1)
    if abs(s) > 1 + 1e-12:
        raise InvalidSqueezeParams(f"|sin theta| = {abs(s):.6g} exceeds 1")
    s = float(np.clip(s, -1.0, 1.0))
    theta = np.arcsin(s)
    if b[0, 0] - b[1, 1] < 0:
        theta = np.pi - theta
    return float(r), float(theta)


def squeezed_tomogram(r, theta, mean_q, mean_p, n, alpha):
    """Closed-form tomogram of a pure squeezed (and displaced) one-mode state."""
    if r < 0:
        raise InvalidSqueezeParams("squeezing parameter r must be nonnegative")
    alpha = complex(alpha)
    n = int(n)
    if r == 0:
        gamma = (mean_q + 1j * mean_p) / np.sqrt(2)
        return coherent_tomogram([gamma], [n], [alpha])
    u = mean_p + np.sqrt(2) * alpha.imag
    v = mean_q + np.sqrt(2) * alpha.real
    t = np.tanh(r)
    log_pref = n * np.log(t) - math.lgamma(n + 1) - n * np.log(2) - np.log(np.cosh(r))
    expo = (
        t * np.sin(theta) * u * v
        - 0.5 * u**2 * (1 - np.cos(theta) * t)
        - 0.5 * v**2 * (1 + np.cos(theta) * t)
    )
    arg = 0.5 * np.exp(-0.5j * theta) * np.sqrt(t) * (
        mean_q - 1j * mean_p + np.sqrt(2) * alpha.conjugate()
        + np.exp(1j * theta) / t * (mean_q + 1j * mean_p + np.sqrt(2) * alpha)
    )
    h = hermite_phys(n, arg)
    return float(np.exp(log_pref + expo) * abs(h) ** 2)


@dataclass(frozen=True)
class NormalizationResult:
    total: float
    cutoff: int
    tail_estimate: float


def normalization_sum(state, alpha, tol=1e-10, start=16, max_cutoff=80):
    """Sum ``omega(n, alpha)`` over ``|n| <= K``, growing ``K`` until the tail is small.

    The tail beyond ``K`` is estimated by geometric extrapolation of the last
    two shell sums ``s_K = sum_{|n| = K} omega``; the exact total is never used.
    """
    K = start
    while True:
        n_box = (K,) * state.modes
        vals = tomogram_table(state, alpha, n_box, cap=None)
        degree = np.add.reduce(np.indices(vals.shape), axis=0)
        shells = np.bincount(degree.ravel(), weights=vals.ravel(), minlength=K * state.modes + 1)[: K + 1]
        total = float(np.sum(shells))
        last, prev = shells[-1], shells[-2]
        ratio = last / prev if prev > 0 else 1.0
        tail = last * ratio / (1 - ratio) if 0 <= ratio < 1 else np.inf
        if tail < tol or K >= max_cutoff:
            return NormalizationResult(total, K, float(tail))
        K = min(int(K * 1.5) + 1, max_cutoff)
