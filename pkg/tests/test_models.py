import math

import numpy as np
import pytest

from isorelax.errors import NotEven, ParseError
from isorelax.mat2 import Mat2, gap, singular_values
from isorelax.models import adm, adm_matrix_energy, by_name, energy_at, from_expression, hencky
from isorelax.scalar import uniform_grid

ADM3 = "t^4 + (4-2*3)*t^2 + 4 - 4*3"


class TestAdm:
    def test_gamma3(self):
        m = adm(3)
        assert m.phi_tilde(0.0) == -8.0
        assert m.closed_form_envelope(0.0) == -9.0
        assert m.closed_form_envelope(1.0) == m.phi_tilde(1.0) == -9.0
        assert m.parameters == {"gamma": 3.0}

    def test_gamma0_is_norm_fourth_power(self):
        m = adm(0)
        for t in (0.0, 1.0, 2.0):
            assert m.phi_tilde(t) == (t * t + 2) ** 2

    def test_convex_case_closed_form_is_profile(self):
        m = adm(1.5)
        ts = np.linspace(-3, 3, 31)
        assert np.array_equal(m.closed_form_envelope(ts), m.phi_tilde(ts))

    @pytest.mark.parametrize("gamma", [2.5, 3.0, 5.0])
    def test_maxwell_tangency(self, gamma):
        cf = adm(gamma).closed_form_envelope
        t0, h = math.sqrt(gamma - 2), 1e-5
        # second-order one-sided stencils
        left = (3 * cf(t0) - 4 * cf(t0 - h) + cf(t0 - 2 * h)) / (2 * h)
        right = (-3 * cf(t0) + 4 * cf(t0 + h) - cf(t0 + 2 * h)) / (2 * h)
        assert cf(t0) == pytest.approx(-gamma ** 2, abs=1e-12)
        assert abs(left) <= 1e-6 and abs(right) <= 1e-6
        assert cf(-t0) == cf(t0)


class TestHencky:
    def test_values(self):
        m = hencky()
        assert m.phi_tilde(0.0) == 0.0
        assert m.phi_tilde(math.e - 1 / math.e) == pytest.approx(2.0, rel=1e-14)
        assert np.all(m.closed_form_envelope(np.linspace(-5, 5, 11)) == 0)
        assert m.envelope_asymptotic


class TestFromExpression:
    def test_even(self):
        m = from_expression("t^2")
        assert m.phi_tilde(-3.0) == 9.0

    def test_odd_rejected(self):
        with pytest.raises(NotEven):
            from_expression("t^3")

    def test_parse_error_propagates(self):
        with pytest.raises(ParseError):
            from_expression("t^")

    def test_matches_builtin(self):
        ts = uniform_grid(-5, 5, 1001).points
        a, b = from_expression(ADM3).phi_tilde(ts), adm(3).phi_tilde(ts)
        assert np.max(np.abs(a - b)) <= 1e-12


class TestEnergyAt:
    def test_adm(self):
        F = Mat2.diag(2, 0.5)
        assert energy_at(adm(3), F) == pytest.approx(-7.4375, abs=1e-12)
        assert adm_matrix_energy(F, 3) == pytest.approx(-7.4375, abs=1e-12)

    def test_hencky(self):
        assert energy_at(hencky(), Mat2.identity()) == 0.0
        assert energy_at(hencky(), Mat2.diag(math.e, 1 / math.e)) == pytest.approx(2.0, rel=1e-14)


def test_by_name():
    assert by_name("adm", gamma=2).parameters["gamma"] == 2.0
    assert by_name("hencky").name == "hencky"
    assert by_name("expr", expr="t^2").name == "expr"
    with pytest.raises(ValueError):
        by_name("adm")
    with pytest.raises(ValueError):
        by_name("neo")


@pytest.mark.parametrize("gamma", [0.0, 1.5, 3.0, 5.0])
def test_adm_dual_route(sl2_suite, gamma):
    m = adm(gamma)
    for F in sl2_suite:
        a = adm_matrix_energy(F, gamma)
        b = m.phi_tilde(gap(F))
        assert abs(a - b) <= 1e-9 * (1 + abs(a))


def test_hencky_dual_route_and_deviatoric(sl2_suite):
    m = hencky()
    for F in sl2_suite:
        smax, smin = singular_values(F)
        # log V has eigenvalues log smax, log smin
        assert abs(math.log(smax) + math.log(smin)) <= 1e-9
        assert abs(math.log(smax) ** 2 + math.log(smin) ** 2 - m.phi_tilde(gap(F))) <= 1e-9


@pytest.mark.parametrize("model", [adm(3), adm(1), hencky()], ids=lambda m: m.name)
def test_builtins_exactly_even(model):
    ts = np.random.default_rng(7).uniform(0, 1e3, 500)
    assert np.array_equal(model.phi_tilde(ts), model.phi_tilde(-ts))
