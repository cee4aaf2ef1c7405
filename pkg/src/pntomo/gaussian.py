"""Gaussian states of N bosonic modes.

Quadratures are dimensionless with hbar = 1, ``q = (a + a^+)/sqrt(2)`` and
``p = (a - a^+)/(i sqrt(2))``, so the vacuum has ``sigma = E/2``. The
covariance is stored in block order: all ``p`` first, then all ``q``.
Wigner functions are normalised so that ``int W dq dp / (2 pi)^N = 1``.
"""

from dataclasses import dataclass, field
import json

import numpy as np

from . import linalg
from .errors import DimensionMismatch

# Block layout of the covariance and of the phase-space vector Q'.
P_FIRST = True
UNCERTAINTY_TOL = 1e-12


def _blocks(modes):
    """Index arrays of the p- and q-blocks in the stored ordering."""
    first = np.arange(modes)
    second = np.arange(modes, 2 * modes)
    return (first, second) if P_FIRST else (second, first)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Quadrature means and covariance of an N-mode Gaussian state.

    The covariance need not satisfy the uncertainty relation: the same
    object represents Gaussian Hermitian operators in positivity checks.
    """

    mean_q: np.ndarray
    mean_p: np.ndarray
    sigma: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self):
        mq = np.atleast_1d(np.asarray(self.mean_q, dtype=float))
        mp = np.atleast_1d(np.asarray(self.mean_p, dtype=float))
        if mq.ndim != 1 or mq.shape != mp.shape:
            raise DimensionMismatch(
                f"mean_q {mq.shape} and mean_p {mp.shape} must be equal-length vectors"
            )
        n = mq.size
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.shape != (2 * n, 2 * n):
            raise DimensionMismatch(
                f"sigma must be 2N x 2N = {2 * n}x{2 * n}, got {sigma.shape}"
            )
        sigma = linalg.sym(sigma)
        if np.any(np.diag(sigma) <= 0):
            raise ValueError("sigma diagonal entries must be positive")
        for name, val in (("mean_q", mq), ("mean_p", mp), ("sigma", sigma)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    def __eq__(self, other):
        if not isinstance(other, GaussianState):
            return NotImplemented
        return (
            np.array_equal(self.mean_q, other.mean_q)
            and np.array_equal(self.mean_p, other.mean_p)
            and np.array_equal(self.sigma, other.sigma)
        )

    __hash__ = None

    @property
    def modes(self):
        return self.mean_q.size

    @classmethod
    def vacuum(cls, modes=1):
        return cls(np.zeros(modes), np.zeros(modes), 0.5 * np.eye(2 * modes))

    @classmethod
    def coherent(cls, gamma):
        """Pure coherent state ``|gamma>`` (one entry of ``gamma`` per mode)."""
        gamma = np.atleast_1d(np.asarray(gamma, dtype=complex))
        n = gamma.size
        return cls(np.sqrt(2) * gamma.real, np.sqrt(2) * gamma.imag, 0.5 * np.eye(2 * n))

    @classmethod
    def thermal(cls, nbar):
        """Product of thermal states with mean photon numbers ``nbar``."""
        nbar = np.atleast_1d(np.asarray(nbar, dtype=float))
        diag = np.concatenate([nbar + 0.5, nbar + 0.5])
        return cls(np.zeros(nbar.size), np.zeros(nbar.size), np.diag(diag))

    @classmethod
    def squeezed(cls, r, theta, mean_q=0.0, mean_p=0.0, nbar=0.0):
        """One-mode squeezed (optionally thermal) state.

        ``cosh 2r`` is the trace of the pure part and ``theta`` fixes the
        correlation ``sigma_pq = (2 nbar + 1) sinh(2r) sin(theta) / 2``.
        In Fock space this is ``S(r e^{-i theta})`` acting on a thermal state.
        """
        c, s = np.cosh(2 * r), np.sinh(2 * r)
        pure = 0.5 * np.array(
            [[c + np.cos(theta) * s, np.sin(theta) * s],
             [np.sin(theta) * s, c - np.cos(theta) * s]]
        )
        if not P_FIRST:
            pure = pure[::-1, ::-1]
        return cls([mean_q], [mean_p], (2 * nbar + 1) * pure)

    def mode_block(self, k):
        """2x2 covariance ``[[s_pp, s_pq], [s_pq, s_qq]]`` of mode ``k``."""
        ip, iq = _blocks(self.modes)
        idx = [ip[k], iq[k]]
        return self.sigma[np.ix_(idx, idx)]

    def phase_vector(self, q, p):
        """``Q'`` in storage order for the point ``(q, p)``; broadcasts over leading axes."""
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        dp = p - self.mean_p
        dq = q - self.mean_q
        return np.concatenate([dp, dq], axis=-1) if P_FIRST else np.concatenate([dq, dp], axis=-1)

    def to_dict(self):
        d = {
            "modes": self.modes,
            "mean_q": self.mean_q.tolist(),
            "mean_p": self.mean_p.tolist(),
            "sigma": self.sigma.tolist(),
        }
        if self.label:
            d["label"] = self.label
        return d

    @classmethod
    def from_dict(cls, data):
        return state_from_dict(data)


def state_from_dict(data):
    """Build a state from the JSON schema, naming the offending field on error."""
    if not isinstance(data, dict):
        raise ValueError("state spec must be a JSON object")
    for key in ("modes", "mean_q", "mean_p", "sigma"):
        if key not in data:
            raise ValueError(f"missing field '{key}'")
    modes = data["modes"]
    if not isinstance(modes, int) or isinstance(modes, bool) or modes < 1:
        raise ValueError("field 'modes' must be a positive integer")
    for key in ("mean_q", "mean_p"):
        vec = data[key]
        if not isinstance(vec, list) or len(vec) != modes:
            raise ValueError(f"field '{key}' must be a list of {modes} numbers")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vec):
            raise ValueError(f"field '{key}' must contain only numbers")
    sigma = data["sigma"]
    dim = 2 * modes
    if (
        not isinstance(sigma, list)
        or len(sigma) != dim
        or not all(isinstance(row, list) and len(row) == dim for row in sigma)
    ):
        raise ValueError(f"field 'sigma': sigma must be 2N×2N ({dim}x{dim} for {modes} modes)")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for row in sigma for v in row):
        raise ValueError("field 'sigma' must contain only numbers")
    arr = np.array(sigma, dtype=float)
    if not np.allclose(arr, arr.T, rtol=0, atol=1e-12):
        raise ValueError("field 'sigma' must be symmetric")
    label = data.get("label", "")
    if not isinstance(label, str):
        raise ValueError("field 'label' must be a string")
    try:
        return GaussianState(data["mean_q"], data["mean_p"], arr, label=label)
    except ValueError as exc:
        raise ValueError(f"field 'sigma': {exc}") from exc


def load_state(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed JSON in {path}: {exc}") from exc
    return state_from_dict(data)


def wigner_eval(state, q, p):
    """Gaussian Wigner function ``det(sigma)^{-1/2} exp(-Q' sigma^{-1} Q'^T / 2)``.

    ``q`` and ``p`` have shape (..., N); the result has shape (...).
    """
    inv = linalg.invert(state.sigma)
    x = state.phase_vector(q, p)
    quad = np.sum((x @ inv) * x, axis=-1)
    return np.exp(-0.5 * quad) / np.sqrt(linalg.determinant(state.sigma))


def displace_state(state, alpha):
    """Apply ``D(alpha)``: means shift by ``sqrt(2) (Re alpha, Im alpha)``."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    if alpha.shape != (state.modes,):
        raise DimensionMismatch(
            f"displacement has {alpha.size} entries, state has {state.modes} modes"
        )
    return GaussianState(
        state.mean_q + np.sqrt(2) * alpha.real,
        state.mean_p + np.sqrt(2) * alpha.imag,
        state.sigma,
        label=state.label,
    )


@dataclass(frozen=True)
class ValidityReport:
    per_mode_det: list
    full_det: float
    passes_per_mode: list
    passes_full: bool

    @property
    def verdict(self):
        return "Valid" if all(self.passes_per_mode) and self.passes_full else "NecessaryFailed"

    @property
    def first_failure(self):
        """Name of the first failed inequality, or None."""
        for k, ok in enumerate(self.passes_per_mode):
            if not ok:
                return f"mode-uncertainty[{k + 1}]"
        if not self.passes_full:
            return "full-uncertainty"
        return None

    def to_dict(self):
        return {
            "per_mode_det": [float(v) for v in self.per_mode_det],
            "full_det": float(self.full_det),
            "passes_per_mode": list(self.passes_per_mode),
            "passes_full": self.passes_full,
            "verdict": self.verdict,
        }


def validate(state, tol=UNCERTAINTY_TOL):
    """Necessary uncertainty conditions on the covariance.

    Per mode ``s_pp s_qq - s_pq^2 >= 1/4`` and overall
    ``det sigma >= (1/4)^N``, both with tolerance ``tol``.
    """
    dets = []
    for k in range(state.modes):
        b = state.mode_block(k)
        dets.append(float(b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]))
    full = linalg.determinant(state.sigma)
    per_mode = [d >= 0.25 - tol for d in dets]
    return ValidityReport(
        per_mode_det=dets,
        full_det=full,
        passes_per_mode=per_mode,
        passes_full=bool(full >= 0.25**state.modes - tol),
    )
