import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from alphacoh import (PDensity, is_classical, negativity, transform_beamsplitter,
                      transform_displace, transform_phase)
from alphacoh.errors import AlphaCohError, HeadroomError, QuadratureError, SingularPError
from alphacoh.pdist import mix, parse_density


def pat_negativity_closed_form(nbar):
    u0 = 1.0 / (nbar + 1.0)
    return ((1 - math.exp(-u0)) - (nbar + 1) * (1 - (1 + u0) * math.exp(-u0))) / nbar


def pat_negativity_quad(nbar):
    # radial oracle: -2 pi int_0^{r0} P(r) r dr
    p = lambda r: ((nbar + 1) * r * r - nbar) * math.exp(-r * r / nbar) / (math.pi * nbar ** 3)
    r0 = math.sqrt(nbar / (nbar + 1))
    val, _ = quad(lambda r: -2 * math.pi * r * p(r), 0.0, r0, epsabs=1e-14)
    return val


@pytest.mark.parametrize("nbar", [0.3, 0.5, 1.0, 2.0])
def test_pat_oracles_agree(nbar):
    assert pat_negativity_quad(nbar) == pytest.approx(pat_negativity_closed_form(nbar), rel=1e-10)


def test_pat_grid_matches_oracle_and_refines():
    exact = pat_negativity_closed_form(0.5)
    assert exact == pytest.approx(0.540252, abs=1e-6)
    coarse = negativity(PDensity.photon_added_thermal(0.5)).value
    fine = negativity(PDensity.photon_added_thermal(0.5, 6.0, 0.025)).value
    assert abs(coarse - exact) / exact < 1e-3
    assert abs(fine - exact) < abs(coarse - exact)


def test_pat_photon_statistics():
    # Fock-space cross-check: <n|P-state|n> = int P e^{-x} x^n / n! equals n q_{n-1} / (nbar+1)
    nbar = 0.5
    p = PDensity.photon_added_thermal(nbar, 8.0, 0.04)
    x = np.abs(p.points()) ** 2
    vals = p.sample()
    for n in range(5):
        got = np.sum(vals * np.exp(-x) * x ** n / math.factorial(n)) * p.h ** 2
        q = lambda k: nbar ** k / (1 + nbar) ** (k + 1)
        want = n * q(n - 1) / (nbar + 1) if n > 0 else 0.0
        assert got == pytest.approx(want, abs=1e-6)


@pytest.mark.parametrize("p", [PDensity.thermal(1.0), PDensity.thermal(0.2),
                               PDensity.displaced_thermal(0.5, 1 - 1j)])
def test_classical_densities_have_zero_negativity(p):
    rep = negativity(p)
    assert rep.value == 0.0 and rep.negative_region_area == 0.0
    assert rep.normalization == pytest.approx(1.0, abs=1e-6)
    assert is_classical(p)


def test_normalisation_check():
    with pytest.raises(QuadratureError):
        negativity(PDensity.thermal(4.0, 3.0, 0.05))


def test_thermal_beamsplitter_oracle():
    # thermal (x) thermal -> thermal with nbar = t n1 + (1-t) n2
    t, n1, n2 = 0.3, 0.8, 0.2
    out = transform_beamsplitter(PDensity.thermal(n1), PDensity.thermal(n2), t)
    ref = PDensity.thermal(t * n1 + (1 - t) * n2).sample()
    assert np.max(np.abs(out.sample() - ref)) < 1e-3 * ref.max()
    assert out.normalization() == pytest.approx(1.0, abs=1e-4)


def test_vacuum_ancilla_is_rescaling():
    pat = PDensity.photon_added_thermal(0.5)
    out = transform_beamsplitter(pat, PDensity.vacuum(), 0.5)
    # a^dag rho a under loss: negativity shrinks but stays positive
    assert 0 < negativity(out).value < negativity(pat).value
    with pytest.raises(SingularPError):
        transform_beamsplitter(pat, PDensity.vacuum(), 0.0)


@settings(max_examples=9, deadline=None)
@given(st.sampled_from([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]))
def test_beamsplitter_never_increases_negativity(t):
    pat = PDensity.photon_added_thermal(0.5)
    out = transform_beamsplitter(pat, PDensity.thermal(0.2), t)
    assert negativity(out).value <= negativity(pat).value + 1e-3


def test_nonclassical_ancilla_rejected():
    pat = PDensity.photon_added_thermal(0.5)
    with pytest.raises(AlphaCohError):
        transform_beamsplitter(PDensity.thermal(1.0), pat, 0.5)


def test_displacement_and_phase_invariance():
    pat = PDensity.photon_added_thermal(0.5)
    base = negativity(pat).value
    assert negativity(transform_displace(pat, 0.5 + 0.5j)).value == pytest.approx(base, abs=1e-3)
    assert negativity(transform_phase(pat, 0.8)).value == pytest.approx(base, abs=1e-3)
    with pytest.raises(HeadroomError):
        transform_displace(pat, 5.0)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 1.0))
def test_convexity(r):
    p, q = PDensity.photon_added_thermal(0.5), PDensity.photon_added_thermal(1.0)
    lhs = negativity(mix(p, q, r)).value
    assert lhs <= r * negativity(p).value + (1 - r) * negativity(q).value + 1e-6


def test_grid_csv_round_trip(tmp_path):
    p = PDensity.photon_added_thermal(0.5, 3.0, 0.1)
    path = tmp_path / "p.csv"
    p.save_csv(path)
    back = parse_density(f"grid:{path}")
    np.testing.assert_allclose(back.sample(), p.sample(), rtol=1e-11, atol=1e-15)
    assert negativity(back).value == pytest.approx(negativity(p).value, rel=1e-10)


def test_parse_density():
    assert parse_density("thermal:1.0").kind == "thermal"
    assert parse_density("dthermal:0.5,1,-1").params["gamma"] == 1 - 1j
    for spec in ("fock:1", "squeezed:0.5", "coherent:1,0", "cat-even:1"):
        with pytest.raises(SingularPError):
            parse_density(spec)
    with pytest.raises(ValueError):
        parse_density("thermal:abc")
    with pytest.raises(ValueError):
        PDensity.thermal(1.0, 6.0, 0.07)
