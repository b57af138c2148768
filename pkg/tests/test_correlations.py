import numpy as np
import pytest
from hypothesis import given, settings

from conftest import red_detuned_params, rel
from optoconv.correlations import (ctherm_closed_form, eo_block, quadrature_spectra,
                                   spectral_matrix)
from optoconv.params import TWO_PI, damping_rates, with_damping
from optoconv.scattering import OUT_E, OUT_F, mechanical_pole


@settings(max_examples=40, deadline=None)
@given(red_detuned_params())
def test_correlations_classically_maximal(p):
    eo = eo_block(spectral_matrix(p, p.omega_m))
    assert rel(abs(eo.c12), np.sqrt(eo.c11 * eo.c22)) < 1e-6
    assert eo.eigen_min >= 0.5 - 1e-9
    assert eo.max_classical


@settings(max_examples=25, deadline=None)
@given(red_detuned_params())
def test_spectra_linear_in_bath(p):
    # [DERIVED] C(n) = C(0) + n dC/dn
    w = p.omega_m + TWO_PI * np.array([-100.0, 0.0, 250.0])
    c0 = spectral_matrix(p.replace(n_th_m=0.0), w).c
    c1 = spectral_matrix(p.replace(n_th_m=1.0), w).c
    c5 = spectral_matrix(p.replace(n_th_m=5.0), w).c
    np.testing.assert_allclose(c5, c0 + 5 * (c1 - c0), rtol=1e-9, atol=1e-9)


def test_vacuum_only_gives_half_photon(s1):
    # [DERIVED] with every bath cold the e/o block is vacuum plus Stokes gain noise
    p = s1.replace(n_th_m=0.0)
    c = spectral_matrix(p, p.omega_m)
    assert np.all(c.thermal_part == 0)
    assert c.c[OUT_F, OUT_F].real >= 0.5 - 1e-12


def test_hermitian(s1):
    c = spectral_matrix(s1, s1.omega_m + TWO_PI * np.linspace(-500, 500, 5)).c
    np.testing.assert_allclose(c, np.conj(np.swapaxes(c, -1, -2)), atol=1e-9)


def _resolved(s1, lossless):
    wm = s1.omega_m
    k = wm / 100
    p = s1.replace(kappa_ex_e=k, kappa_int_e=0.0 if lossless else 0.2 * k,
                   kappa_ex_o=k, kappa_B_o=0.0 if lossless else 0.1 * k,
                   kappa_int_o=0.0 if lossless else 0.3 * k, delta_e=-wm, delta_o=-wm)
    return with_damping(p, gamma_e=TWO_PI * 40, gamma_o=TWO_PI * 90)


def _thermal_eo(p):
    th = spectral_matrix(p, -mechanical_pole(p).imag).thermal_part
    return np.array([[th[OUT_F, OUT_F].real, abs(th[OUT_F, OUT_E])],
                     [abs(th[OUT_E, OUT_F]), th[OUT_E, OUT_E].real]])


def test_closed_form_thermal_block_resolved(s1):
    p = _resolved(s1, lossless=True)
    np.testing.assert_allclose(_thermal_eo(p), ctherm_closed_form(damping_rates(p), p.n_th_m),
                               rtol=0.05)


def test_closed_form_with_port_losses(s1):
    # [DERIVED] only the external fraction of each cavity's emission reaches its port
    p = _resolved(s1, lossless=False)
    f = np.sqrt(np.array([p.kappa_ex_o / p.kappa_o, p.kappa_ex_e / p.kappa_e]))
    ref = ctherm_closed_form(damping_rates(p), p.n_th_m) * np.outer(f, f)
    np.testing.assert_allclose(_thermal_eo(p), ref, rtol=0.05)


def test_closed_form_simple_cases():
    from optoconv.params import DampingRates

    assert np.all(ctherm_closed_form(DampingRates(3.0, 4.0, 1.0), 0.0) == 0)
    c = ctherm_closed_form(DampingRates(1e4, 1e4, 1e-3), 50.0)
    assert c[0, 0] == pytest.approx(50.0 * 1e-3 / 1e4, rel=1e-6)


def test_decoupled_microwave_has_no_cross_term(s1):
    eo = eo_block(spectral_matrix(s1.replace(g_e=0.0), s1.omega_m))
    assert abs(eo.c12) == 0


def test_quadrature_spectra_fig3(p3):
    w0 = -mechanical_pole(p3).imag
    s = quadrature_spectra(p3, w0, phase_ref=w0)
    assert s.x_eo == s.y_eo
    # geometric mean relation carries the sqrt(eps) of the optical block
    assert s.x_eo == pytest.approx(np.sqrt(s.x_ee * s.x_oo), rel=1e-6)
    # converter-referred peaks close to the reference thermal peaks 69.2/33.1/47.7
    assert s.x_ee == pytest.approx(69.2, rel=0.05)
    assert s.x_oo == pytest.approx(33.1, rel=0.06)
    assert s.x_eo == pytest.approx(47.7, rel=0.05)


def test_cross_term_real_at_reference(p3):
    w0 = -mechanical_pole(p3).imag
    s = quadrature_spectra(p3, w0 + TWO_PI * np.linspace(-2000, 2000, 41), phase_ref=w0)
    assert s.x_eo[20] == pytest.approx(s.x_eo.max(), rel=1e-3)
