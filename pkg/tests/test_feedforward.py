import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optoconv.dsp import QuadratureTrace
from optoconv.feedforward import (FeedforwardConfig, NoiseBudget, ff_spectrum, ff_timeseries,
                                  n_add_input_referred, optimal_weight, weight_sweep)

# measured-style single-quadrature values on resonance (photons)
FIG3 = NoiseBudget(x_oo=33.1 + 2.7, y_oo=33.1 + 2.7, x_ee=69.2 + 29.6 + 2.2,
                   y_ee=69.2 + 29.6 + 2.2, x_eo=47.7, y_eo=47.7)
CFG = FeedforwardConfig(w=1.6, n_e=29.6, n_o=2.7)


def test_zero_weight_is_identity():
    x, y = ff_spectrum(FIG3, CFG.with_w(0.0))
    assert (x, y) == (FIG3.x_oo, FIG3.y_oo)


def test_hand_computed_value():
    # [DERIVED] by hand: 35.8 + 1.6^2 (2.7/29.6) 101 - 2 (1.6) sqrt(2.7/29.6) 47.7
    r = 2.7 / 29.6
    expect = 35.8 + 2.56 * r * 101.0 - 3.2 * np.sqrt(r) * 47.7
    assert ff_spectrum(FIG3, CFG)[0] == pytest.approx(expect, rel=1e-12)


def test_optimal_weight_closed_form():
    w = optimal_weight(FIG3, CFG)
    assert w == pytest.approx(np.sqrt(29.6 / 2.7) * 47.7 / 101.0, rel=1e-12)
    assert w == pytest.approx(1.57, abs=0.05)
    assert optimal_weight(FIG3, CFG, "total") == pytest.approx(w)
    with pytest.raises(ValueError):
        optimal_weight(FIG3, CFG, "z")


@settings(max_examples=60, deadline=None)
@given(st.floats(0.5, 50), st.floats(0.5, 50), st.floats(0, 200), st.floats(0, 200),
       st.floats(0, 1), st.floats(-3, 3))
def test_optimum_is_minimum(n_e, n_o, th_e, th_o, corr, dw):
    xeo = corr * np.sqrt(th_e * th_o)
    b = NoiseBudget(th_o + n_o, th_o + n_o, th_e + n_e, th_e + n_e, xeo, xeo)
    cfg = FeedforwardConfig(0.0, n_e, n_o)
    w = optimal_weight(b, cfg)
    best = ff_spectrum(b, cfg.with_w(w))[0]
    assert best <= ff_spectrum(b, cfg.with_w(w + dw))[0] + 1e-9 * (1 + abs(best))
    # never below the optical floor when chain noise is at least vacuum
    assert best >= n_o * (1 - 1e-12) - 1e-9


def test_scale_invariance():
    # [DERIVED] scaling both microwave quantities and n_e together leaves x_check fixed
    k = 3.7
    b2 = NoiseBudget(FIG3.x_oo, FIG3.y_oo, k * FIG3.x_ee, k * FIG3.y_ee,
                     np.sqrt(k) * FIG3.x_eo, np.sqrt(k) * FIG3.y_eo)
    c2 = FeedforwardConfig(1.6, k * 29.6, 2.7)
    assert ff_spectrum(b2, c2)[0] == pytest.approx(ff_spectrum(FIG3, CFG)[0], rel=1e-12)


def test_n_add():
    cfg = FeedforwardConfig(0.0, 29.6, 2.7, gain_a=1.4, eta=0.37)
    assert n_add_input_referred(10.0, 5.4, cfg) == pytest.approx(4.6 / (1.4 * 0.37))
    with pytest.raises(ValueError):
        n_add_input_referred(1.0, 0.0, FeedforwardConfig(0.0, 1.0, 1.0, eta=0.0))


def test_weight_sweep_is_parabola():
    x, y = weight_sweep(FIG3, CFG, [0.0, 1.0, 2.0])
    assert x.shape == (3,)
    # second difference of a quadratic in w is constant: 2 r x_ee
    assert x[0] - 2 * x[1] + x[2] == pytest.approx(2 * (2.7 / 29.6) * 101.0)


def test_config_validation():
    with pytest.raises(ValueError, match="n_e"):
        FeedforwardConfig(1.0, 0.3, 1.0)
    with pytest.raises(ValueError, match="finite"):
        FeedforwardConfig(float("inf"), 1.0, 1.0)


def test_timeseries_combination():
    rng = np.random.default_rng(1)
    qo, qe = rng.normal(size=(2, 100))
    o = QuadratureTrace(qo, -qo, 1e-3)
    e = QuadratureTrace(qe, qe, 1e-3)
    out = ff_timeseries(o, e, CFG)
    np.testing.assert_allclose(out.q, qo - 1.6 * np.sqrt(2.7 / 29.6) * qe)
    with pytest.raises(ValueError, match="lengths"):
        ff_timeseries(o, QuadratureTrace(qe[:50], qe[:50], 1e-3), CFG)
    with pytest.raises(ValueError, match="sample"):
        ff_timeseries(o, QuadratureTrace(qe, qe, 2e-3), CFG)
