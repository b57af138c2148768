import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import red_detuned_params, rel
from optoconv.params import (TWO_PI, ConverterParams, ParameterError, bose_occupancy,
                             coupling_for_damping, damping_rate_full, damping_rate_rwa,
                             damping_rates, mechanical_self_energy, pump_enhanced_coupling,
                             sideband_rates, device_params, with_damping)


def test_table_values_converted_to_angular(s1):
    assert s1.omega_m == pytest.approx(TWO_PI * 1.4732e6)
    assert s1.kappa_e == pytest.approx(TWO_PI * 2.5e6)
    assert s1.kappa_o == pytest.approx(TWO_PI * 2.1e6)
    assert s1.epsilon == 0.87


def test_requested_damping_is_reached(s1):
    r = damping_rates(s1)
    assert r.gamma_e == pytest.approx(TWO_PI * 725, rel=1e-12)
    assert r.gamma_o == pytest.approx(TWO_PI * 725, rel=1e-12)
    assert r.gamma_T == pytest.approx(TWO_PI * 1461, rel=1e-12)


def test_rwa_damping_formula():
    # [TRIVIAL] 4 g^2 / kappa
    assert damping_rate_rwa(3.0, 2.0) == pytest.approx(18.0)
    with pytest.raises(ParameterError):
        damping_rate_rwa(1.0, 0.0)


def test_full_damping_approaches_rwa_when_resolved():
    # [DERIVED] deep sideband resolution: the Stokes term vanishes
    wm = TWO_PI * 1e7
    p = ConverterParams(omega_m=wm, gamma_m=1.0, kappa_ex_e=1e3, kappa_int_e=0, kappa_ex_o=1e3,
                        kappa_B_o=0, kappa_int_o=0, delta_e=-wm, delta_o=-wm, g_e=10.0, g_o=0.0)
    assert rel(damping_rate_full(p, "e"), damping_rate_rwa(10.0, 1e3)) < 1e-6


def test_damping_is_cooling_minus_heating(s1):
    cool, heat = sideband_rates(s1, "o")
    assert cool > heat > 0
    assert damping_rate_full(s1, "o") == pytest.approx(cool - heat, rel=1e-12)


def test_self_energy_is_array_friendly(s1):
    w = s1.omega_m + np.linspace(-1e3, 1e3, 5)
    sig = mechanical_self_energy(s1, "e", w)
    assert sig.shape == (5,)
    assert sig[2] == pytest.approx(mechanical_self_energy(s1, "e"))


@settings(max_examples=40, deadline=None)
@given(red_detuned_params())
def test_damping_quadratic_in_coupling(p):
    # [DERIVED] Gamma(g) = g^2 Gamma(1), so doubling g quadruples the damping
    for port in ("e", "o"):
        g = p.port(port)[0]
        twice = p.replace(**{f"g_{port}": 2 * g})
        assert rel(damping_rate_full(twice, port), 4 * damping_rate_full(p, port)) < 1e-10


def test_coupling_round_trip(s1):
    g = coupling_for_damping(s1, "e", TWO_PI * 300)
    assert damping_rate_full(s1.replace(g_e=g), "e") == pytest.approx(TWO_PI * 300, rel=1e-12)


def test_blue_detuning_rejected(s1):
    blue = s1.replace(delta_o=-s1.delta_o)
    with pytest.raises(ParameterError, match="anti-damps"):
        coupling_for_damping(blue, "o", TWO_PI * 100)


def test_with_damping_only_touches_requested_port(s1):
    p = with_damping(s1, gamma_e=TWO_PI * 50)
    assert p.g_o == s1.g_o
    assert damping_rates(p).gamma_e == pytest.approx(TWO_PI * 50)


@pytest.mark.parametrize("field,value", [("epsilon", 1.5), ("kappa_ex_e", 0.0), ("g_e", -1.0),
                                         ("n_th_m", float("nan")), ("omega_m", -1.0)])
def test_invalid_parameters(s1, field, value):
    with pytest.raises(ParameterError, match=field):
        s1.replace(**{field: value})


def test_zero_internal_and_back_loss_allowed(s1):
    p = s1.replace(kappa_int_e=0.0, kappa_int_o=0.0, kappa_B_o=0.0)
    assert p.kappa_o == p.kappa_ex_o


def test_bose_occupancy():
    assert bose_occupancy(1.0, 0.0) == 0.0
    # [DERIVED] high-temperature limit kT / (hbar omega) - 1/2
    w = TWO_PI * 1.4732e6
    n = bose_occupancy(w, 0.087)
    assert n == pytest.approx(1.380649e-23 * 0.087 / (1.054571817e-34 * w) - 0.5, rel=1e-4)
    with pytest.raises(ParameterError):
        bose_occupancy(w, -1.0)


def test_pump_enhanced_coupling():
    assert pump_enhanced_coupling(2.0, 3.0, 5.0) == 30.0


def test_table_without_pumps():
    p = device_params(gamma_e=None, gamma_o=None)
    assert p.g_e == p.g_o == 0.0
    assert math.isclose(damping_rates(p).gamma_T, p.gamma_m)
