import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gammaln

from alphacoh import (MaximizerSet, SearchConfig, apply_phase_rotation, cat_state, coherent_vector,
                      fock_state, husimi, maximize_overlap, squeezed_vacuum)
from alphacoh.errors import VanishedResidualError
from alphacoh.fock import overlap, random_state
from alphacoh.verify import RANDOM_A, RANDOM_B


def brute_force_max(psi, radius=4.0, points=801):
    # independent oracle: |<alpha|psi>|^2 on a dense grid, no refinement
    amps = psi.amplitudes
    n = np.arange(amps.size)
    ax = np.linspace(-radius, radius, points)
    a = (ax[:, None] + 1j * ax[None, :]).ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        logmag = n[None, :] * np.log(np.abs(a)[:, None]) - 0.5 * gammaln(n + 1)[None, :]
    coh = np.exp(logmag - 0.5 * np.abs(a)[:, None] ** 2) * np.exp(1j * n[None, :] * np.angle(a)[:, None])
    coh[:, 0] = np.exp(-0.5 * np.abs(a) ** 2)
    q = np.abs(coh.conj() @ amps) ** 2
    k = int(np.argmax(q))
    return a[k], q[k]


@pytest.mark.parametrize("coeffs", [RANDOM_A, RANDOM_B])
def test_matches_brute_force(coeffs):
    psi = random_state(coeffs, 30)
    ms = maximize_overlap(psi)
    alpha, val = brute_force_max(psi)
    assert ms.value >= val - 1e-12
    assert ms.value == pytest.approx(val, rel=1e-4)
    assert abs(ms.canonical - alpha) < 0.02
    assert ms.degeneracy_kind == "unique"


def test_value_is_squared_overlap():
    psi = random_state(RANDOM_A)
    ms = maximize_overlap(psi)
    assert ms.value == pytest.approx(abs(overlap(coherent_vector(ms.canonical), psi)) ** 2, rel=1e-9)
    assert husimi(psi, ms.canonical) == pytest.approx(ms.value, rel=1e-9)


def test_coherent_state_is_its_own_maximiser():
    ms = maximize_overlap(coherent_vector(1.1 - 0.4j))
    assert ms.degeneracy_kind == "unique"
    assert abs(ms.canonical - (1.1 - 0.4j)) < 1e-5
    assert ms.value == pytest.approx(1.0, abs=1e-10)


def test_cat_has_two_symmetric_maximisers():
    ms = maximize_overlap(cat_state(2.0, "odd"))
    assert ms.degeneracy_kind == "discrete"
    assert len(ms.maximizers) == 2
    a, b = ms.maximizers
    assert abs(a + b) < 1e-5
    assert ms.value == pytest.approx(0.5, abs=1e-3)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fock_orbit(n):
    ms = maximize_overlap(fock_state(n))
    assert ms.degeneracy_kind == "orbit"
    assert len(ms.maximizers) == SearchConfig().k_orbit
    radii = np.abs(ms.maximizers)
    np.testing.assert_allclose(radii, math.sqrt(n), atol=1e-4)
    # analytic peak: Poisson probability at its mode
    assert ms.value == pytest.approx(math.exp(-n) * n ** n / math.factorial(n), rel=1e-8)


def test_squeezed_pair_on_real_axis():
    ms = maximize_overlap(squeezed_vacuum(0.9))
    assert ms.degeneracy_kind in ("unique", "discrete")
    for a in ms.maximizers:
        assert abs(a.imag) < 1e-4


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 2 * math.pi))
def test_rotation_covariance(theta):
    psi = random_state(RANDOM_B)
    a = maximize_overlap(psi)
    b = maximize_overlap(apply_phase_rotation(psi, theta))
    assert b.value == pytest.approx(a.value, rel=1e-7)
    assert abs(abs(b.canonical) - abs(a.canonical)) < 1e-4


def test_density_input_matches_pure():
    psi = random_state(RANDOM_A)
    a = maximize_overlap(psi)
    b = maximize_overlap(psi.density().matrix)
    assert b.value == pytest.approx(a.value, rel=1e-9)
    assert abs(b.canonical - a.canonical) < 1e-6


def test_subnormalised_residual_and_vanishing():
    psi = random_state(RANDOM_A)
    ms = maximize_overlap(0.1 * psi.amplitudes)
    assert ms.value == pytest.approx(0.01 * maximize_overlap(psi).value, rel=1e-8)
    with pytest.raises(VanishedResidualError):
        maximize_overlap(np.zeros(61, dtype=complex))


def test_deterministic_and_config_round_trip():
    cfg = SearchConfig(grid_points=81)
    assert SearchConfig.from_dict(cfg.to_dict()) == cfg
    psi = cat_state(1.3, "even")
    assert maximize_overlap(psi, cfg) == maximize_overlap(psi, cfg)
    assert isinstance(maximize_overlap(psi, cfg), MaximizerSet)
    with pytest.raises(ValueError):
        SearchConfig.from_dict({"bogus": 1})


def test_husimi_closed_forms():
    assert husimi(coherent_vector(0.4 + 1j), 0.4 + 1j) == pytest.approx(1.0, abs=1e-8)
    assert husimi(fock_state(1), 0.0) == 0.0
    assert husimi(fock_state(2), math.sqrt(2)) == pytest.approx(2 * math.exp(-2), abs=1e-8)
