"""Photon-number tomograms of Gaussian states.

Closed-form tomograms via multivariable Hermite polynomials, independent
quadrature and Fock-space oracles, density-matrix reconstruction and
positivity scans for Gaussian Hermitian operators.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ComplexTomogram,
    ConfigInvalid,
    DegreeCapExceeded,
    DimensionMismatch,
    GridTooCoarse,
    InvalidSqueezeParams,
    NotHermitian,
    SingularMatrix,
    TomoError,
    TruncationRisk,
)
from .gaussian import GaussianState, ValidityReport, displace_state, load_state, validate, wigner_eval  # noqa: E402
from .hermite import HermiteParams, hermite_eval, hermite_series_oracle  # noqa: E402
from .tomogram import (  # noqa: E402
    build_kernel,
    coherent_tomogram,
    normalization_sum,
    squeezed_tomogram,
    tomogram_table,
    tomogram_value,
)
from .fock import (  # noqa: E402
    FockMatrix,
    QuadratureGrid,
    displacement_matrix,
    reference_density,
    tomogram_by_quadrature,
    tomogram_from_fock,
)
from .reconstruction import ReconstructionConfig, reconstruct_density, roundtrip_residual  # noqa: E402
from .positivity import (  # noqa: E402
    PositivityReport,
    ScanSpec,
    gaussian_positivity_report,
    scan_tomogram_negativity,
    wigner_admissibility_check,
)
