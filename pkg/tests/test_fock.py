import warnings

import numpy as np
import pytest
from scipy.special import eval_laguerre

from pntomo.errors import DimensionMismatch, GridTooCoarse, TruncationRisk
from pntomo.fock import (
    QuadratureGrid,
    displacement_elements,
    displacement_matrix,
    fock_moments,
    laguerre_all,
    laguerre_eval,
    min_eigenvalue,
    product_density,
    quadrature_table,
    reference_density,
    tomogram_by_quadrature,
    tomogram_from_fock,
)
from pntomo.gaussian import GaussianState
from pntomo.tomogram import tomogram_table

from conftest import ALPHAS, correlated_one_mode


def test_laguerre_matches_scipy():
    x = np.linspace(0, 30, 61)
    for n in (0, 1, 2, 7, 20):
        assert np.allclose(laguerre_eval(n, x), eval_laguerre(n, x), rtol=1e-10, atol=1e-10)
    table = laguerre_all(10, x)
    assert np.allclose(table[10], eval_laguerre(10, x), rtol=1e-10)
    with pytest.raises(ValueError):
        laguerre_eval(-1, 0.0)


def test_displacement_is_unitary_in_the_interior():
    D = displacement_elements(0.6 - 0.4j, 80, 80)
    block = (D.conj().T @ D)[:20, :20]
    assert np.allclose(block, np.eye(20), atol=1e-12)


def test_displacement_of_vacuum_is_coherent():
    alpha = 0.7 + 0.2j
    D = displacement_matrix(alpha, 20)
    col = D[:, 0]
    n = np.arange(21)
    expected = np.exp(-abs(alpha) ** 2 / 2) * alpha**n / np.sqrt(
        np.array([float(np.prod(np.arange(1, k + 1))) for k in n])
    )
    assert np.allclose(col, expected, atol=1e-14)


def test_displacement_composition():
    a, b = 0.3 + 0.1j, -0.2 + 0.4j
    Da = displacement_elements(a, 60, 60)
    Db = displacement_elements(b, 60, 60)
    Dab = displacement_elements(a + b, 60, 60)
    phase = np.exp(1j * np.imag(a * np.conj(b)))
    assert np.allclose((Da @ Db)[:15, :15], phase * Dab[:15, :15], atol=1e-12)


def test_truncation_warning():
    with pytest.warns(TruncationRisk):
        displacement_matrix(2.5, 16)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        displacement_matrix(1.0, 16)


@pytest.mark.parametrize(
    "kind, params",
    [
        ("coherent", {"gamma": 0.5}),
        ("thermal", {"nbar": 0.5}),
        ("squeezed", {"r": 0.3, "theta": 0.4}),
        ("gaussian", {"nbar": 0.3, "r": 0.2, "theta": 1.1, "gamma": 0.2 - 0.1j}),
    ],
)
def test_reference_densities_are_states(kind, params):
    rho = reference_density(kind, 30, **params)
    assert rho.trace == pytest.approx(1.0, abs=1e-6)
    assert min_eigenvalue(rho) > -1e-12
    assert rho.deficit < 1e-6


def test_reference_moments_match_state():
    state = GaussianState.squeezed(0.4, 1.2, mean_q=0.3, mean_p=-0.1, nbar=0.2)
    rho = reference_density("gaussian", 40, nbar=0.2, r=0.4, theta=1.2, gamma=complex(0.3, -0.1) / np.sqrt(2))
    mq, mp, cov = fock_moments(rho)
    assert mq == pytest.approx(0.3, abs=1e-9)
    assert mp == pytest.approx(-0.1, abs=1e-9)
    assert np.allclose(cov, state.sigma, atol=1e-9)


def test_quadrature_matches_closed_form(one_mode_states):
    for state in one_mode_states.values():
        for a in ALPHAS:
            fine, coarse = quadrature_table(state, a, (6,))
            closed = tomogram_table(state, a, (6,))
            assert np.allclose(fine, closed, atol=1e-9)
            assert np.allclose(fine, coarse, atol=1e-6)


def test_quadrature_negative_for_subvacuum_covariance():
    op = GaussianState([0], [0], 0.4 * np.eye(2))
    assert tomogram_by_quadrature(op, 1, 0.0) == pytest.approx(-0.1 / 0.81, abs=1e-8)


def test_grid_too_coarse():
    narrow = GaussianState.squeezed(1.8, 0.0)
    with pytest.raises(GridTooCoarse):
        quadrature_table(narrow, 0.0, (4,), grid=QuadratureGrid(spacing=0.5))


def test_fock_route_for_correlated_state():
    state = correlated_one_mode()
    from pntomo.reconstruction import reference_for_state

    rho = reference_for_state(state, 40)
    for a in ALPHAS:
        closed = tomogram_table(state, a, (6,))
        for n in range(7):
            assert tomogram_from_fock(rho, [n], [a]) == pytest.approx(closed[n], abs=1e-10)


def test_product_density_indexing():
    a = reference_density("thermal", 6, nbar=0.5)
    b = reference_density("coherent", 6, gamma=0.3)
    ab = product_density([a, b])
    assert ab.modes == 2
    assert ab.element((1, 2), (1, 2)) == pytest.approx(a.matrix[1, 1] * b.matrix[2, 2])
    with pytest.raises(DimensionMismatch):
        tomogram_from_fock(ab, [1], [0.0])
