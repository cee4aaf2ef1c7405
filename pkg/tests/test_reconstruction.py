import numpy as np
import pytest

from pntomo.errors import ConfigInvalid
from pntomo.fock import displacement_elements, reference_density
from pntomo.gaussian import GaussianState
from pntomo.reconstruction import (
    GaussianTomogramSource,
    ReconstructionConfig,
    displaced_power_elements,
    frobenius,
    polar_grid,
    reconstruct_density,
    reference_for_state,
    roundtrip_residual,
)


def reconstruct(state, **kw):
    cfg = ReconstructionConfig(**kw).for_state(state)
    return reconstruct_density(GaussianTomogramSource(state), cfg)


@pytest.mark.parametrize("t", [0.5, -0.3 + 0.2j, 1.0])
def test_kernel_matches_truncated_product_for_bounded_t(t):
    beta = 0.4 - 0.3j
    big = 90
    D = displacement_elements(beta, big, big)
    Dm = displacement_elements(-beta, big, big)
    power = np.diag(t ** np.arange(big))
    product = (D @ power @ Dm)[:10, :10]
    assert np.allclose(displaced_power_elements(beta, t, 9), product, atol=1e-12)


def test_kernel_at_zero_displacement_is_diagonal():
    t = -3.0
    k = displaced_power_elements(0.0, t, 6)
    assert np.allclose(k, np.diag(t ** np.arange(7)))


def test_polar_grid_integrates_gaussian():
    nodes, w = polar_grid(0.3 - 0.1j, 6.0, 40, 40)
    f = np.exp(-np.abs(nodes - (0.3 - 0.1j)) ** 2)
    assert np.sum(w * f) == pytest.approx(np.pi, rel=1e-10)


def test_config_validation():
    with pytest.raises(ConfigInvalid):
        ReconstructionConfig(s=(0.5,))
    with pytest.raises(ConfigInvalid):
        ReconstructionConfig(s=(-1.0,))
    with pytest.raises(ConfigInvalid):
        ReconstructionConfig(radial_nodes=0)
    with pytest.raises(ConfigInvalid):
        ReconstructionConfig(max_radius=2.5).for_state(GaussianState.coherent(1.0))


@pytest.mark.parametrize(
    "state",
    [
        GaussianState.vacuum(),
        GaussianState.coherent(0.5),
        GaussianState.thermal(0.5),
        GaussianState.squeezed(0.3, 0.0),
    ],
    ids=["vacuum", "coherent", "thermal", "squeezed"],
)
def test_round_trip(state):
    res = reconstruct(state)
    ref = reference_for_state(state, 12)
    assert frobenius(res.rho, ref) <= 1e-2
    assert 0.98 <= res.diagnostics["trace"] <= 1.02
    assert res.diagnostics["hermiticity_residual"] <= 1e-3
    assert roundtrip_residual(state, ReconstructionConfig()) <= 2e-2


def test_s_independence():
    vac = GaussianState.vacuum()
    a = reconstruct(vac, s=(-0.3,))
    b = reconstruct(vac, s=(-0.6,))
    assert frobenius(a.rho, b.rho) <= 5e-3


def test_two_mode_product_state():
    sigma = np.diag([0.5, 1.0, 0.5, 1.0])  # vacuum x thermal(0.5)
    state = GaussianState([0.0, 0.0], [0.0, 0.0], sigma)
    cfg = ReconstructionConfig(
        cutoff=4, radial_nodes=16, angular_nodes=12, n_max=10, max_radius=3.5
    ).for_state(state)
    res = reconstruct_density(GaussianTomogramSource(state), cfg)
    ref = reference_for_state(state, 4)
    assert frobenius(res.rho, ref) <= 1e-2
    assert res.rho.matrix.shape == (25, 25)


def test_callable_source_matches_batched_source():
    state = GaussianState.thermal(0.3)
    cfg = ReconstructionConfig(cutoff=3, radial_nodes=8, angular_nodes=8, n_max=6).for_state(state)
    src = GaussianTomogramSource(state)
    batched = reconstruct_density(src, cfg)
    plain = reconstruct_density(lambda n, a: src(n, a), cfg, modes=1)
    assert np.allclose(batched.rho.matrix, plain.rho.matrix, atol=1e-12)


def test_result_is_hermitian():
    res = reconstruct(GaussianState.squeezed(0.3, 0.8, mean_q=0.2))
    m = res.rho.matrix
    assert np.array_equal(m, m.conj().T)
    assert res.diagnostics["min_eigenvalue"] > -1e-2


def test_reference_for_state_rejects_correlated_modes(two_mode_state):
    with pytest.raises(ValueError):
        reference_for_state(two_mode_state, 4)


def test_reference_thermal_matches_diag():
    ref = reference_for_state(GaussianState.thermal(0.5), 8)
    assert np.allclose(ref.matrix, reference_density("thermal", 8, nbar=0.5).matrix)
