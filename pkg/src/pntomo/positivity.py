"""Positivity checks for Gaussian Hermitian operators.

A Hermitian operator is a density operator only if its photon-number
tomogram is nonnegative for every ``(n, alpha)``. For Gaussian operators
the tomogram is available in closed form, so negativity can be searched
for on a grid. A grid scan can only find counterexamples: "PassedAllScans"
means that no witness was found on the scanned grid, nothing more.
"""

from dataclasses import dataclass, field
import itertools

import numpy as np

from .fock import QuadratureGrid, quadrature_table
from .gaussian import validate
from .tomogram import tomogram_table

DEFAULT_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ScanSpec:
    """Photon numbers ``|n| <= n_max`` times a square alpha grid per mode.

    Every mode gets ``resolution`` points on each of Re alpha and Im alpha
    in ``[-alpha_box, alpha_box]``; the grid for N modes is the product.
    """

    n_max: int = 15
    alpha_box: float = 3.0
    resolution: int = 9
    offset: tuple = None  # added to every grid point (one complex per mode)

    def alphas(self, modes):
        axis = np.linspace(-self.alpha_box, self.alpha_box, self.resolution)
        plane = (axis[:, None] + 1j * axis[None, :]).ravel()
        pts = np.array(list(itertools.product(plane, repeat=modes)), dtype=complex)
        if self.offset is not None:
            pts = pts + np.asarray(self.offset, dtype=complex)[None, :]
        return pts

    def to_dict(self):
        d = {"n_max": self.n_max, "alpha_box": self.alpha_box, "resolution": self.resolution}
        if self.offset is not None:
            d["offset"] = [[complex(c).real, complex(c).imag] for c in self.offset]
        d["note"] = "no witness found on this grid does not certify positivity"
        return d


@dataclass(frozen=True)
class Witness:
    n: tuple
    alpha: tuple
    omega: float

    def sort_key(self):
        return (self.n, tuple((a.real, a.imag) for a in self.alpha))

    def to_dict(self):
        return {
            "n": list(self.n),
            "alpha": [[a.real, a.imag] for a in self.alpha],
            "omega": self.omega,
        }


@dataclass
class PositivityReport:
    negative_witnesses: list
    scan_spec: dict
    uncertainty_checks: object = None
    method: str = "hermite"
    min_value: float = field(default=float("nan"))

    @property
    def verdict(self):
        return "NegativeWitnessFound" if self.negative_witnesses else "PassedAllScans"

    @property
    def failed_first(self):
        """First failed condition: uncertainty inequalities, then the scan."""
        if self.uncertainty_checks is not None:
            name = self.uncertainty_checks.first_failure
            if name:
                return name
        if self.negative_witnesses:
            return "tomogram-negativity"
        return None

    @property
    def passed(self):
        return self.failed_first is None

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "passed": self.passed,
            "failed_first": self.failed_first,
            "method": self.method,
            "min_value": self.min_value,
            "uncertainty_checks": (
                None if self.uncertainty_checks is None else self.uncertainty_checks.to_dict()
            ),
            "negative_witnesses": [w.to_dict() for w in self.negative_witnesses],
            "scan_spec": self.scan_spec,
        }


def _collect(values, alphas, n_max, tolerance):
    """Witnesses from a value table of shape (n_1+1, ..., n_N+1, B)."""
    witnesses = []
    degree = np.add.reduce(np.indices(values.shape[:-1]), axis=0)
    mask = (values < -tolerance) & (degree <= n_max)[..., None]
    for idx in zip(*np.nonzero(mask)):
        n, b = tuple(int(i) for i in idx[:-1]), idx[-1]
        witnesses.append(Witness(n, tuple(complex(a) for a in alphas[b]), float(values[idx])))
    witnesses.sort(key=Witness.sort_key)
    in_range = values[(degree <= n_max)]
    return witnesses, float(np.min(in_range)) if in_range.size else float("nan")


def _resolve(state, n_max, alpha_grid):
    if alpha_grid is None:
        alpha_grid = ScanSpec(n_max=n_max)
    if isinstance(alpha_grid, ScanSpec):
        return alpha_grid.alphas(state.modes), alpha_grid.to_dict()
    alphas = np.asarray(alpha_grid, dtype=complex).reshape(-1, state.modes)
    return alphas, {"n_max": n_max, "alphas": len(alphas)}


def scan_tomogram_negativity(state, n_max=15, alpha_grid=None, tolerance=DEFAULT_TOLERANCE):
    """Search the closed-form tomogram for values below ``-tolerance``.

    ``alpha_grid`` is a :class:`ScanSpec` or an explicit array of
    displacements with shape (B, N). Raw, unclamped values are used.
    """
    alphas, spec = _resolve(state, n_max, alpha_grid)
    spec = dict(spec, n_max=n_max, tolerance=tolerance)
    values = tomogram_table(state, alphas, (n_max,) * state.modes, cap=None)
    witnesses, low = _collect(values, alphas, n_max, tolerance)
    return PositivityReport(witnesses, spec, None, "hermite", low)


def gaussian_positivity_report(state, scan_spec=None, tolerance=DEFAULT_TOLERANCE):
    """Uncertainty inequalities plus the tomogram scan in one report."""
    scan_spec = scan_spec or ScanSpec()
    report = scan_tomogram_negativity(state, scan_spec.n_max, scan_spec, tolerance)
    report.uncertainty_checks = validate(state)
    return report


def wigner_admissibility_check(
    state, n_max=10, alpha_grid=None, tolerance=DEFAULT_TOLERANCE, grid=None
):
    """Same scan, but every value comes from phase-space quadrature of the Wigner function."""
    if state.modes > 2:
        raise ValueError("quadrature scans support at most two modes")
    alphas, spec = _resolve(state, n_max, alpha_grid)
    spec = dict(spec, n_max=n_max, tolerance=tolerance)
    grid = grid or QuadratureGrid.for_modes(state.modes)
    cols = [quadrature_table(state, a, (n_max,) * state.modes, grid=grid)[0] for a in alphas]
    values = np.stack(cols, axis=-1)
    witnesses, low = _collect(values, alphas, n_max, tolerance)
    return PositivityReport(witnesses, spec, None, "quadrature", low)
