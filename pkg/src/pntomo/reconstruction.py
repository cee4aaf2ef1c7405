"""Density-matrix reconstruction from photon-number tomograms.

For ordering parameters ``s_k`` in (-1, 0] the inversion reads

    rho = int prod_k d^2 alpha_k / pi
          sum_n prod_k [2 / (1 - s_k)] ((s_k + 1)/(s_k - 1))^{n_k} omega(n, alpha)
          * prod_k [2 / (1 + s_k)] D(-alpha_k) t_k^{a^+ a} D(alpha_k),

    t_k = (s_k - 1) / (s_k + 1).

``|t_k| >= 1`` for ``s_k <= 0``, so the operator ``t^{a^+ a}`` is not
bounded and cannot be truncated before the displacements are applied. Its
displaced matrix elements are evaluated exactly instead (a finite sum for
every pair of levels), and only the outer alpha integral is discretised.
"""

from dataclasses import dataclass, field, replace
import math
import warnings

import numpy as np
from scipy.special import gammaln, roots_legendre

from . import linalg
from .errors import ConfigInvalid, DimensionMismatch
from .fock import FockMatrix, product_density, reference_density, tomogram_from_fock
from .gaussian import GaussianState
from .tomogram import squeeze_params, tomogram_table


@dataclass(frozen=True)
class ReconstructionConfig:
    """Quadrature and truncation settings for :func:`reconstruct_density`.

    ``centre`` is the polar-grid centre in the alpha plane per mode; ``None``
    means "use the state's displaced origin" where a state is known, else 0.
    """

    s: tuple = (-0.5,)
    cutoff: int = 12
    radial_nodes: int = 40
    angular_nodes: int = 40
    max_radius: float = 4.0
    n_max: int = 20
    centre: tuple = None

    def __post_init__(self):
        s = tuple(float(v) for v in np.atleast_1d(self.s))
        object.__setattr__(self, "s", s)
        if self.centre is not None:
            object.__setattr__(
                self, "centre", tuple(complex(c) for c in np.atleast_1d(self.centre))
            )
        self.validate()

    @property
    def modes(self):
        return len(self.s)

    def validate(self):
        for v in self.s:
            if not -1 < v <= 0:
                raise ConfigInvalid(f"ordering parameter s = {v} outside (-1, 0]")
        if self.cutoff < 0 or self.n_max < 0:
            raise ConfigInvalid("cutoff and n_max must be nonnegative")
        if self.radial_nodes < 1 or self.angular_nodes < 1:
            raise ConfigInvalid("grid needs at least one radial and one angular node")
        if self.max_radius <= 0:
            raise ConfigInvalid("max_radius must be positive")
        if self.centre is not None and len(self.centre) != self.modes:
            raise ConfigInvalid("centre needs one entry per mode")

    def for_state(self, state):
        """Copy with ``s`` broadcast to the state's modes and the centre filled in."""
        s = self.s if len(self.s) == state.modes else (self.s[0],) * state.modes
        centre = self.centre
        if centre is None:
            centre = tuple(-(state.mean_q + 1j * state.mean_p) / np.sqrt(2))
        cfg = replace(self, s=s, centre=centre)
        offset = max(abs(c) for c in cfg.centre)
        if cfg.max_radius < 2 + offset:
            raise ConfigInvalid(
                f"max_radius {cfg.max_radius} must be at least 2 + |centre| = {2 + offset:.3g}"
            )
        return cfg

    def to_dict(self):
        return {
            "s": list(self.s),
            "cutoff": self.cutoff,
            "radial_nodes": self.radial_nodes,
            "angular_nodes": self.angular_nodes,
            "max_radius": self.max_radius,
            "n_max": self.n_max,
            "centre": None if self.centre is None else [[c.real, c.imag] for c in self.centre],
        }


def polar_grid(centre, radius, radial_nodes, angular_nodes):
    """Nodes and weights for ``int d^2 alpha`` over a disc.

    Gauss-Legendre in the radius (with the Jacobian folded in), trapezoid
    in the angle.
    """
    x, w = roots_legendre(radial_nodes)
    r = 0.5 * radius * (x + 1)
    wr = 0.5 * radius * w * r
    phi = 2 * np.pi * np.arange(angular_nodes) / angular_nodes
    nodes = complex(centre) + (r[:, None] * np.exp(1j * phi)[None, :]).ravel()
    weights = np.repeat(wr, angular_nodes) * (2 * np.pi / angular_nodes)
    return nodes, weights


def displaced_power_elements(beta, t, cutoff):
    """``<j| D(beta) t^{a^+ a} D(-beta) |k>`` for ``j, k <= cutoff``.

    ``beta`` may be an array; the result has shape ``beta.shape + (M+1, M+1)``.
    Uses ``t^{a^+ a} = :exp((t - 1) a^+ a):`` and normal ordering, which
    leaves a finite sum over ``m <= min(j, k)``.
    """
    beta = np.asarray(beta, dtype=complex)
    c = t - 1.0
    x = -c * beta
    y = -c * np.conj(beta)
    size = cutoff + 1
    lf = gammaln(np.arange(size) + 1)
    out = np.zeros(beta.shape + (size, size), dtype=complex)
    xp = np.stack([x**p for p in range(size)], axis=-1)
    yp = np.stack([y**p for p in range(size)], axis=-1)
    for j in range(size):
        for k in range(size):
            acc = 0
            for m in range(min(j, k) + 1):
                coef = math.exp(0.5 * (lf[j] + lf[k]) - lf[j - m] - lf[k - m] - lf[m]) * t**m
                acc = acc + coef * xp[..., j - m] * yp[..., k - m]
            out[..., j, k] = acc
    return out * np.exp(c * np.abs(beta) ** 2)[..., None, None]


def n_weights(s, n_max):
    """``[2 / (1 - s)] ((s + 1) / (s - 1))^n`` for n = 0..n_max."""
    return 2 / (1 - s) * ((s + 1) / (s - 1)) ** np.arange(n_max + 1)


class GaussianTomogramSource:
    """Tomogram of a Gaussian state, usable as a reconstruction input."""

    def __init__(self, state):
        self.state = state
        self.modes = state.modes

    def __call__(self, n, alpha):
        n = tuple(int(k) for k in np.atleast_1d(n))
        return float(tomogram_table(self.state, alpha, n, cap=None)[n])

    def table(self, alphas, n_box):
        """Values for all ``n <= n_box`` at a batch of displacements (B, N); shape (..., B)."""
        return tomogram_table(self.state, alphas, n_box, cap=None)


def _source_table(source, alphas, n_box):
    if hasattr(source, "table"):
        return source.table(alphas, n_box)
    grids = [range(k + 1) for k in n_box]
    out = np.zeros(tuple(k + 1 for k in n_box) + (len(alphas),))
    for idx in np.ndindex(*[len(g) for g in grids]):
        for b, a in enumerate(alphas):
            out[idx + (b,)] = source(idx, a)
    return out


@dataclass
class ReconstructionResult:
    rho: FockMatrix
    raw: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def reconstruct_density(tomogram_source, config, modes=None):
    """Fock-basis density matrix from tomogram values.

    Parameters
    ----------
    tomogram_source : callable ``(n, alpha) -> float``
        May also provide ``table(alphas, n_box)`` for batched evaluation.
    config : ReconstructionConfig
        ``s`` must have one entry per mode (see ``config.for_state``).
    modes : int, optional
        Defaults to ``tomogram_source.modes`` or ``len(config.s)``.
    """
    config.validate()
    modes = modes or getattr(tomogram_source, "modes", None) or config.modes
    if config.modes != modes:
        raise ConfigInvalid(f"config has {config.modes} ordering parameters for {modes} modes")
    if modes > 2:
        raise ConfigInvalid("reconstruction supports one or two modes")
    centre = config.centre or (0j,) * modes
    grids = [
        polar_grid(centre[k], config.max_radius, config.radial_nodes, config.angular_nodes)
        for k in range(modes)
    ]
    n_box = (config.n_max,) * modes
    t_vals = [(s - 1) / (s + 1) for s in config.s]
    kernels = [
        2 / (1 + s) * displaced_power_elements(-nodes, t, config.cutoff)
        for (nodes, _), s, t in zip(grids, config.s, t_vals)
    ]
    if modes == 1:
        nodes, weights = grids[0]
        omega = _source_table(tomogram_source, nodes[:, None], n_box)  # (n+1, B)
        f = n_weights(config.s[0], config.n_max) @ omega
        raw = np.einsum("b,bjk->jk", weights * f / np.pi, kernels[0])
    else:
        (n1, w1), (n2, w2) = grids
        a1 = np.repeat(n1, n2.size)
        a2 = np.tile(n2, n1.size)
        omega = _source_table(tomogram_source, np.column_stack([a1, a2]), n_box)
        f = np.einsum(
            "i,j,ijb->b", n_weights(config.s[0], config.n_max), n_weights(config.s[1], config.n_max), omega
        ).reshape(n1.size, n2.size)
        g = np.einsum("ab,b,bkl->akl", f, w2 / np.pi, kernels[1])
        raw = np.einsum("a,aij,akl->ikjl", w1 / np.pi, kernels[0], g)
        size = (config.cutoff + 1) ** 2
        raw = raw.reshape(size, size)
    herm_res = linalg.hermiticity_residual(raw)
    rho = 0.5 * (raw + raw.conj().T)
    eig = linalg.hermitian_eigenvalues(rho)
    trace = float(np.trace(rho).real)
    result = FockMatrix(rho, modes, config.cutoff, max(0.0, 1 - trace))
    diagnostics = {
        "trace": trace,
        "hermiticity_residual": herm_res,
        "min_eigenvalue": float(eig[0]),
        "alpha_nodes": int(np.prod([g[0].size for g in grids])),
    }
    return ReconstructionResult(result, raw, diagnostics)


def frobenius(a, b):
    a = a.matrix if isinstance(a, FockMatrix) else a
    b = b.matrix if isinstance(b, FockMatrix) else b
    return float(np.linalg.norm(a - b))


def default_probes(modes):
    """Small probe set of ``(n, alpha)`` pairs for round-trip checks."""
    alphas = [0.0, 0.4, 0.3j, -0.3 + 0.2j]
    if modes == 1:
        return [((n,), (a,)) for n in range(6) for a in alphas]
    return [
        ((n1, n2), (a, b))
        for n1 in range(4)
        for n2 in range(4)
        for a, b in [(0.0, 0.0), (0.4, 0.3j), (-0.3 + 0.2j, 0.2)]
    ]


def roundtrip_residual(state, config, probes=None):
    """Max deviation between the tomogram and the tomogram of its reconstruction."""
    cfg = config.for_state(state)
    source = GaussianTomogramSource(state)
    rec = reconstruct_density(source, cfg)
    probes = probes or default_probes(state.modes)
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n, a in probes:
            expected = source(n, np.asarray(a, dtype=complex))
            got = tomogram_from_fock(rec.rho, n, a)
            worst = max(worst, abs(got - expected))
    return worst


def reference_for_state(state, cutoff):
    """Analytic Fock matrix for one-mode states and block-diagonal two-mode states.

    Each mode must be a displaced squeezed thermal state.
    """
    parts = []
    for k in range(state.modes):
        others = [i for i in range(state.modes) if i != k]
        if others:
            idx_k = [k, state.modes + k]
            idx_o = [i for i in range(2 * state.modes) if i not in idx_k]
            if np.max(np.abs(state.sigma[np.ix_(idx_k, idx_o)])) > 1e-14:
                raise DimensionMismatch("reference density needs a block-diagonal covariance")
        b = state_mode(state, k)
        parts.append(_one_mode_reference(b, cutoff))
    return product_density(parts)


def state_mode(state, k):
    return GaussianState([state.mean_q[k]], [state.mean_p[k]], state.mode_block(k))


def _one_mode_reference(state, cutoff):
    b = state.sigma
    d = b[0, 0] * b[1, 1] - b[0, 1] ** 2
    nbar = np.sqrt(d) - 0.5
    pure = state.sigma / (2 * nbar + 1)
    r, theta = squeeze_params(GaussianState([0.0], [0.0], pure))
    gamma = complex(state.mean_q[0], state.mean_p[0]) / np.sqrt(2)
    if abs(nbar) < 1e-14 and r == 0:
        return reference_density("coherent", cutoff, gamma=gamma)
    if abs(nbar) < 1e-14:
        return reference_density("squeezed", cutoff, r=r, theta=theta, gamma=gamma)
    if r == 0 and gamma == 0:
        return reference_density("thermal", cutoff, nbar=nbar)
    return reference_density("gaussian", cutoff, nbar=nbar, r=r, theta=theta, gamma=gamma)
