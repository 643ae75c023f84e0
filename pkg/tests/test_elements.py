import csv
import io
import math

import numpy as np
import pytest

from photoexc.coulomb import CoulombOrbital
from photoexc.elements import (
    ELEMENT_COLUMNS,
    SQRT_4PI,
    angular_c,
    angular_c_quadrature,
    compute_elements,
    fsi_elements,
    isi_p,
    isi_s,
    radial_integral,
    shake_overlap,
)
from photoexc.wavefunction import CorrelatedWavefunction, HylleraasTerm, coalescence_profile


def product_wf(Z):
    """phi_1s(r1) phi_1s(r2), up to normalization."""
    return CorrelatedWavefunction(Z, Z, [HylleraasTerm(0, 0, 0, 1.0)], -Z**2)


@pytest.fixture(scope="module")
def he_profile(helium):
    return coalescence_profile(helium)


class TestRadialIntegral:
    @pytest.mark.parametrize("n,l", [(1, 0), (2, 1), (4, 2), (6, 0)])
    def test_normalization(self, n, l):
        orb = CoulombOrbital(n, l, 2.0)
        assert radial_integral(orb, orb) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonality(self):
        a, b = CoulombOrbital(2, 0, 2.0), CoulombOrbital(3, 0, 2.0)
        assert abs(radial_integral(a, b)) < 1e-10

    def test_gamma_oracle(self):
        val = radial_integral(lambda r: np.exp(-r), CoulombOrbital(1, 0, 1.0))
        assert val == pytest.approx(0.5, rel=1e-12)


class TestNullCases:
    @pytest.mark.parametrize("Z", [2.0, 10.0])
    def test_product_wavefunction(self, Z):
        me = compute_elements(product_wf(Z), n_max=6)
        for n in range(2, 7):
            assert abs(me.s(n)) <= 1e-10 * abs(me.s(1))
        for n in range(2, 7):
            assert me.P[n] == 0.0

    def test_single_term_isi(self):
        wf = CorrelatedWavefunction(2.0, 1.9, [HylleraasTerm(0, 0, 0, 0.7)], -2.8)
        prof = coalescence_profile(wf)
        for n in (1, 2, 3):
            orb = CoulombOrbital(n, 0, 2.0)
            assert isi_s(prof, orb) == pytest.approx(-1.9**2 * shake_overlap(prof, orb), rel=1e-10)


def test_p_linear_in_u_term(helium):
    c = 0.37
    extra = helium.with_terms([t if t.powers != (0, 0, 1) else
                               HylleraasTerm(0, 0, 1, t.coefficient + c) for t in helium.terms])
    orb = CoulombOrbital(2, 1, 2.0)
    delta = isi_p(coalescence_profile(extra), orb) - isi_p(coalescence_profile(helium), orb)
    expected = c * SQRT_4PI * 2 / math.sqrt(3) * radial_integral(
        lambda r: np.exp(-helium.alpha * r), orb)
    assert delta == pytest.approx(expected, rel=1e-9)


def test_wrong_l_rejected(he_profile):
    with pytest.raises(ValueError):
        isi_s(he_profile, CoulombOrbital(2, 1, 2.0))
    with pytest.raises(ValueError):
        isi_p(he_profile, CoulombOrbital(2, 0, 2.0))
    with pytest.raises(ValueError):
        fsi_elements(he_profile, CoulombOrbital(2, 1, 2.0))
    with pytest.raises(ValueError):
        fsi_elements(he_profile, CoulombOrbital(2, 0, 2.0), nu=0.0)


@pytest.mark.parametrize("nu", [1e-3, 0.2, 1e3])
@pytest.mark.parametrize("n", [1, 2, 4])
def test_nu_shift_identities(he_profile, nu, n):
    orb = CoulombOrbital(n, 0, 2.0)
    s = shake_overlap(he_profile, orb)
    u1, _, w1 = fsi_elements(he_profile, orb, 1.0)
    u, _, w = fsi_elements(he_profile, orb, nu)
    ln = math.log(nu)
    scale = abs(s) + abs(u1) + abs(w1)
    assert abs(u - (u1 + ln * s)) <= 1e-10 * scale * (1 + abs(ln))
    assert abs(w - (w1 - ln * u1 - 0.5 * ln**2 * s)) <= 1e-10 * scale * (1 + ln**2)


class TestAngular:
    def test_closed_form(self):
        assert angular_c(1) == pytest.approx(-0.8660254037844386, rel=1e-15)
        assert angular_c(2) == pytest.approx(-math.sqrt(5) / 6, rel=1e-15)

    @pytest.mark.parametrize("l", range(1, 7))
    def test_quadrature(self, l):
        assert abs(angular_c_quadrature(l) - angular_c(l)) < 1e-10

    def test_negative_decreasing(self):
        c = [angular_c(l) for l in range(1, 12)]
        assert all(x < 0 for x in c)
        assert all(abs(b) < abs(a) for a, b in zip(c, c[1:]))

    def test_s_wave_rejected(self):
        with pytest.raises(ValueError):
            angular_c(0)
        with pytest.raises(ValueError):
            angular_c_quadrature(0)


@pytest.fixture(scope="module")
def he_elements(pipeline):
    return pipeline.elements(2.0)


def _all_values(me):
    return ([me.S[k] for k in sorted(me.S)] + [d[n] for d in (me.Q, me.U, me.V, me.W)
                                              for n in sorted(d)]
            + [me.P[n] for n in sorted(me.P)])


def test_sign_convention(he_elements):
    assert he_elements.s(1) > 0


def test_rescale_homogeneous(helium, he_elements):
    lam = 3.7
    scaled = compute_elements(helium.scaled(lam))
    for a, b in zip(_all_values(he_elements), _all_values(scaled)):
        assert b == pytest.approx(lam * a, rel=1e-12)


def test_panel_halving(helium, he_elements):
    coarse = compute_elements(helium, per_octave=1)
    for a, b in zip(_all_values(he_elements), _all_values(coarse)):
        assert abs(a - b) <= 1e-9 * abs(a)


def test_csv_dump(he_elements):
    rows = list(csv.DictReader(io.StringIO(he_elements.to_csv())))
    assert tuple(rows[0]) == ELEMENT_COLUMNS
    assert len(rows) == len(he_elements.S)
    first = rows[0]
    assert float(first["S"]) == he_elements.s(1)
    assert (int(first["n"]), int(first["l"])) == (1, 0)


def test_element_table_shape(he_elements):
    assert set(he_elements.S) == {(n, l) for n in range(1, 7) for l in range(min(n - 1, 3) + 1)}
    assert set(he_elements.P) == set(range(2, 7))
    assert set(he_elements.Q) == set(range(1, 7))
