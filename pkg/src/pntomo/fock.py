"""Brute-force references in phase space and in a truncated Fock basis.

Two routes to the tomogram that share no code with the Hermite formula:

* phase-space quadrature of the displaced Wigner function against the
  Wigner function of ``|n><n|``,
  ``2 (-1)^n exp(-q^2 - p^2) L_n(2 (q^2 + p^2))``, with measure
  ``dq dp / (2 pi)`` per mode;
* operator algebra ``<n| D(alpha) rho D(alpha)^+ |n>`` with exact
  displacement matrix elements and a truncated density matrix.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln

from . import linalg
from .errors import DimensionMismatch, GridTooCoarse, TruncationRisk
from .gaussian import P_FIRST, displace_state, wigner_eval

DEFAULT_CUTOFF = 16
REFINEMENT_TOL = 1e-6


def laguerre_eval(n, x):
    """Laguerre polynomial ``L_n(x)`` by the three-term recurrence."""
    if n < 0 or n > 512:
        raise ValueError("laguerre_eval supports 0 <= n <= 512")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur


def laguerre_all(n_max, x):
    """Stack ``[L_0(x), ..., L_{n_max}(x)]`` along a new leading axis."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = 1.0
    if n_max:
        out[1] = 1.0 - x
    for k in range(1, n_max):
        out[k + 1] = ((2 * k + 1 - x) * out[k] - k * out[k - 1]) / (k + 1)
    return out


# ---------------------------------------------------------------------------
# phase-space quadrature


@dataclass(frozen=True)
class QuadratureGrid:
    """Cartesian trapezoid grid for every ``(q_k, p_k)`` axis.

    Each axis spans at least ``[-half_width, half_width]`` and is widened to
    cover ``coverage`` standard deviations around the displaced mean. The
    refinement check compares against the same sum on every other node.
    """

    spacing: float = 0.05
    half_width: float = 8.0
    coverage: float = 8.0

    @classmethod
    def for_modes(cls, modes):
        if modes == 1:
            return cls()
        # 2N-dimensional tensor grid: keep the node count manageable
        return cls(spacing=0.2, half_width=6.0)

    def axis(self, centre, std):
        lo = min(-self.half_width, centre - self.coverage * std)
        hi = max(self.half_width, centre + self.coverage * std)
        k_lo = math.floor(lo / self.spacing)
        k_hi = math.ceil(hi / self.spacing)
        if (k_hi - k_lo) % 2:
            k_hi += 1  # even number of intervals so the coarse grid nests
        nodes = self.spacing * np.arange(k_lo, k_hi + 1)
        weights = np.full(nodes.size, self.spacing)
        weights[[0, -1]] *= 0.5
        return nodes, weights


def _fock_wigner(n_max, q, p):
    """``2 (-1)^n exp(-r^2) L_n(2 r^2)`` for n = 0..n_max."""
    r2 = q * q + p * p
    sign = (-1.0) ** np.arange(n_max + 1)
    lag = laguerre_all(n_max, 2 * r2)
    return 2 * np.exp(-r2) * sign.reshape((-1,) + (1,) * r2.ndim) * lag


def quadrature_table(state, alpha, n_box, grid=None, check=True):
    """Quadrature tomogram for all ``n <= n_box``; returns ``(fine, coarse)`` arrays.

    ``coarse`` uses every other node of the same grid.
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    n_box = tuple(int(k) for k in np.atleast_1d(n_box))
    N = state.modes
    if alpha.shape != (N,) or len(n_box) != N:
        raise DimensionMismatch("alpha and n need one entry per mode")
    if N > 2:
        raise ValueError("quadrature oracle supports at most two modes")
    grid = grid or QuadratureGrid.for_modes(N)
    shifted = displace_state(state, alpha)
    std = np.sqrt(np.diag(state.sigma))
    # axes ordered (q_1..q_N, p_1..p_N)
    axes = []
    for k in range(N):
        axes.append(grid.axis(shifted.mean_q[k], std[N + k]))
    for k in range(N):
        axes.append(grid.axis(shifted.mean_p[k], std[k]))
    kernels = []
    for k in range(N):
        Q, P = np.meshgrid(axes[k][0], axes[N + k][0], indexing="ij")
        kernels.append(_fock_wigner(n_box[k], Q, P) / (2 * np.pi))
    if N == 1:
        (qn, qw), (pn, pw) = axes
        Q, P = np.meshgrid(qn, pn, indexing="ij")
        W = wigner_eval(shifted, Q[..., None], P[..., None])
        kern = kernels[0]
        fine = np.sum(kern * (W * np.outer(qw, pw)), axis=(1, 2))
        wc = np.outer(_coarse_weights(qw), _coarse_weights(pw))
        coarse = np.sum(kern[:, ::2, ::2] * (W[::2, ::2] * wc), axis=(1, 2))
    else:
        fine, coarse = _two_mode_sum(shifted, axes, kernels, n_box)
    if check:
        diff = np.max(np.abs(fine - coarse))
        if diff > REFINEMENT_TOL:
            raise GridTooCoarse(f"grid refinement changed the tomogram by {diff:.3e}")
    return fine, coarse


def _coarse_weights(fine_weights):
    h = 2 * fine_weights[1]
    w = np.full((fine_weights.size + 1) // 2, h)
    w[[0, -1]] *= 0.5
    return w


def _two_mode_sum(shifted, axes, kernels, n_box):
    (q1, wq1), (q2, wq2), (p1, wp1), (p2, wp2) = axes
    k1, k2 = kernels  # (n_k + 1, |q_k|, |p_k|)
    fine = np.zeros((n_box[0] + 1, n_box[1] + 1))
    coarse = np.zeros_like(fine)
    cq1, cp1 = _coarse_weights(wq1), _coarse_weights(wp1)
    cq2, cp2 = _coarse_weights(wq2), _coarse_weights(wp2)
    w2 = np.outer(wq2, wp2)
    c2 = np.outer(cq2, cp2)
    # Gaussian exponent assembled from 1-D offsets; storage order is
    # (p1, p2, q1, q2) and the loop below fixes q1.
    inv = linalg.invert(shifted.sigma)
    norm = 1.0 / np.sqrt(linalg.determinant(shifted.sigma))
    dp1 = (p1 - shifted.mean_p[0])[:, None, None]
    dq2 = (q2 - shifted.mean_q[1])[None, :, None]
    dp2 = (p2 - shifted.mean_p[1])[None, None, :]
    ip1, ip2, iq1, iq2 = range(4) if P_FIRST else (2, 3, 0, 1)
    rest = [(ip1, dp1), (ip2, dp2), (iq2, dq2)]
    base = sum(inv[i, j] * xi * xj for i, xi in rest for j, xj in rest)
    lin = sum(2 * inv[iq1, i] * xi for i, xi in rest)
    for i, qv in enumerate(q1):
        d = qv - shifted.mean_q[0]
        W = norm * np.exp(-0.5 * (base + d * lin + inv[iq1, iq1] * d * d))  # (|p1|, |q2|, |p2|)
        # contract mode 2 first, then the p1 axis of mode 1
        inner = np.einsum("jab,iab->ji", k2, W * w2)  # (n2+1, |p1|)
        fine += wq1[i] * np.einsum("kb,jb->kj", k1[:, i, :] * wp1, inner)
        if i % 2 == 0:
            inner_c = np.einsum("jab,iab->ji", k2[:, ::2, ::2], W[::2, ::2, ::2] * c2)
            coarse += cq1[i // 2] * np.einsum("kb,jb->kj", k1[:, i, ::2] * cp1, inner_c)
    return fine, coarse


def tomogram_by_quadrature(state, n, alpha, grid=None, check=True):
    """Phase-space quadrature of the tomogram at one ``(n, alpha)``."""
    n = tuple(int(k) for k in np.atleast_1d(n))
    fine, _ = quadrature_table(state, alpha, n, grid=grid, check=check)
    return float(fine[n])


# ---------------------------------------------------------------------------
# Fock-space operators


def _guard(alpha, cutoff, stacklevel=3):
    if abs(alpha) ** 2 > cutoff / 4:
        warnings.warn(
            f"|alpha|^2 = {abs(alpha) ** 2:.3g} exceeds cutoff/4 = {cutoff / 4:.3g}",
            TruncationRisk,
            stacklevel=stacklevel,
        )


def displacement_elements(alpha, rows, cols):
    """Exact ``<m| D(alpha) |n>`` for ``m < rows`` and ``n < cols``."""
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    m = np.arange(rows)[:, None]
    n = np.arange(cols)[None, :]
    lo = np.minimum(m, n)
    diff = np.abs(m - n)
    lag = eval_genlaguerre(lo, diff, x)
    log_ratio = 0.5 * (gammaln(lo + 1) - gammaln(np.maximum(m, n) + 1))
    base = np.where(m >= n, alpha, -alpha.conjugate())
    with np.errstate(divide="ignore", invalid="ignore"):
        power = np.where(diff == 0, 1.0 + 0j, base ** diff)
    return np.exp(log_ratio - 0.5 * x) * power * lag


def displacement_matrix(alpha, cutoff=DEFAULT_CUTOFF):
    """``<m| D(alpha) |n>`` for ``0 <= m, n <= cutoff``."""
    _guard(alpha, cutoff)
    return displacement_elements(alpha, cutoff + 1, cutoff + 1)


@dataclass(frozen=True)
class FockMatrix:
    """Density-like operator on ``(cutoff + 1)^modes`` Fock levels.

    Basis order is lexicographic in ``(n_1, ..., n_N)``; ``deficit`` is the
    trace lost to truncation when known.
    """

    matrix: np.ndarray
    modes: int = 1
    cutoff: int = DEFAULT_CUTOFF
    deficit: float = 0.0

    def __post_init__(self):
        dim = (self.cutoff + 1) ** self.modes
        if self.matrix.shape != (dim, dim):
            raise DimensionMismatch(f"matrix shape {self.matrix.shape} does not match {dim}")

    @property
    def trace(self):
        return float(np.trace(self.matrix).real)

    def element(self, bra, ket):
        return self.matrix[self.index(bra), self.index(ket)]

    def index(self, levels):
        levels = np.atleast_1d(levels)
        return int(np.ravel_multi_index(tuple(levels), (self.cutoff + 1,) * self.modes))

    def kron(self, other):
        if self.cutoff != other.cutoff:
            raise DimensionMismatch("cutoffs differ")
        return FockMatrix(
            np.kron(self.matrix, other.matrix),
            self.modes + other.modes,
            self.cutoff,
            1 - (1 - self.deficit) * (1 - other.deficit),
        )


def _coherent_amplitudes(gamma, size):
    gamma = complex(gamma)
    k = np.arange(size)
    with np.errstate(divide="ignore"):
        logmag = k * np.log(abs(gamma)) if gamma != 0 else np.where(k == 0, 0.0, -np.inf)
    phase = np.exp(1j * k * np.angle(gamma))
    return np.exp(logmag - 0.5 * abs(gamma) ** 2 - 0.5 * gammaln(k + 1)) * phase


def _squeezed_vacuum_amplitudes(r, theta, size):
    """``S(r e^{-i theta}) |0>`` amplitudes; only even levels are populated."""
    c = np.zeros(size, dtype=complex)
    c[0] = 1 / np.sqrt(np.cosh(r))
    step = -np.exp(-1j * theta) * np.tanh(r)
    for m in range(0, (size - 1) // 2):
        k = 2 * m
        c[k + 2] = c[k] * step * np.sqrt((k + 1) * (k + 2)) / (2 * (m + 1))
    return c


def _squeeze_operator(r, theta, size):
    a = np.diag(np.sqrt(np.arange(1, size)), 1)
    xi = r * np.exp(-1j * theta)
    return expm(0.5 * (np.conj(xi) * a @ a - xi * a.T @ a.T))


def reference_density(kind, cutoff=DEFAULT_CUTOFF, **params):
    """Analytic one-mode density matrices for tests.

    kind : ``"coherent"`` (gamma), ``"thermal"`` (nbar),
        ``"squeezed"`` (r, theta, gamma: displaced pure squeezed state) or
        ``"gaussian"`` (nbar, r, theta, gamma: displaced squeezed thermal).

    ``theta`` follows :meth:`GaussianState.squeezed`.
    """
    size = cutoff + 1
    big = size + 60
    if kind == "coherent":
        gamma = complex(params.get("gamma", 0.0))
        _guard(gamma, cutoff)
        psi = _coherent_amplitudes(gamma, size)
        rho = np.outer(psi, psi.conj())
    elif kind == "thermal":
        nbar = float(params["nbar"])
        k = np.arange(size)
        rho = np.diag(nbar**k / (nbar + 1) ** (k + 1)).astype(complex)
    elif kind == "squeezed":
        gamma = complex(params.get("gamma", 0.0))
        _guard(gamma, cutoff)
        psi = _squeezed_vacuum_amplitudes(params["r"], params.get("theta", 0.0), big)
        if gamma != 0:
            psi = displacement_elements(gamma, big, big) @ psi
        psi = psi[:size]
        rho = np.outer(psi, psi.conj())
    elif kind == "gaussian":
        gamma = complex(params.get("gamma", 0.0))
        _guard(gamma, cutoff)
        nbar = float(params.get("nbar", 0.0))
        dim = 3 * big
        k = np.arange(dim)
        th = np.diag(nbar**k / (nbar + 1) ** (k + 1))
        S = _squeeze_operator(params.get("r", 0.0), params.get("theta", 0.0), dim)
        rho = S @ th @ S.conj().T
        if gamma != 0:
            D = displacement_elements(gamma, dim, dim)
            rho = D @ rho @ D.conj().T
        rho = rho[:size, :size]
    else:
        raise ValueError(f"unknown reference state kind {kind!r}")
    rho = 0.5 * (rho + rho.conj().T)
    deficit = max(0.0, 1.0 - float(np.trace(rho).real))
    return FockMatrix(rho, 1, cutoff, deficit)


def product_density(parts):
    """Tensor product of one-mode FockMatrix objects (block-diagonal states)."""
    out = parts[0]
    for p in parts[1:]:
        out = out.kron(p)
    return out


def tomogram_from_fock(rho, n, alpha):
    """``<n| D(alpha) rho D(alpha)^+ |n>`` by Fock-space algebra."""
    n = np.atleast_1d(np.asarray(n, dtype=int))
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    if n.shape != (rho.modes,) or alpha.shape != (rho.modes,):
        raise DimensionMismatch("n and alpha need one entry per mode")
    row = np.ones(1, dtype=complex)
    for k in range(rho.modes):
        _guard(alpha[k], rho.cutoff)
        v = displacement_elements(alpha[k], n[k] + 1, rho.cutoff + 1)[n[k]]
        row = np.kron(row, v)
    return float(np.real(row @ rho.matrix @ row.conj()))


def min_eigenvalue(rho):
    m = rho.matrix if isinstance(rho, FockMatrix) else np.asarray(rho)
    return float(linalg.hermitian_eigenvalues(m)[0])


def fock_moments(rho):
    """Quadrature means and covariance (p first) of a one-mode FockMatrix."""
    if rho.modes != 1:
        raise DimensionMismatch("fock_moments needs a one-mode matrix")
    size = rho.cutoff + 1
    a = np.diag(np.sqrt(np.arange(1, size)), 1)
    q = (a + a.T) / np.sqrt(2)
    p = (a - a.T) / (1j * np.sqrt(2))
    m = rho.matrix / np.trace(rho.matrix)

    def ev(op):
        return float(np.trace(m @ op).real)

    mq, mp = ev(q), ev(p)
    spp = ev(p @ p) - mp**2
    sqq = ev(q @ q) - mq**2
    spq = ev(0.5 * (p @ q + q @ p)) - mp * mq
    return mq, mp, np.array([[spp, spq], [spq, sqq]])
