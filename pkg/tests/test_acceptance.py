"""Acceptance criteria 1-11, each at its stated tolerance, one PASS/FAIL line per criterion."""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, random_red_detuned
from optoconv import cavity, shiftcode
from optoconv.config import load_config
from optoconv.correlations import eo_block, quadrature_spectra, spectral_matrix
from optoconv.dsp import ChainNoise, narrowband, quadrature_spectra as welch_spectra, synthesize_outputs
from optoconv.feedforward import (FeedforwardConfig, NoiseBudget, ff_spectrum,
                                  n_add_input_referred, optimal_weight)
from optoconv.params import TWO_PI, damping_rates, low_power_params, device_params, with_damping
from optoconv.qfeedforward import AncillaSpec, added_noise
from optoconv.scattering import (closed_form_efficiency, efficiency_curve, efficiency_report,
                                 eta_matched, fit_matched_efficiency, mechanical_pole, s_params)
from optoconv.scenarios import SCENARIOS


def report(n: int, ok: bool, detail: str):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.s = time.perf_counter() - self.t0


def test_c01_efficiency_closure():
    with Timer() as t:
        p = device_params()
        grid = TWO_PI * np.geomspace(50, 1e4, 30)
        pts = efficiency_curve(p, grid)
        gT = np.array([q.gamma_T for q in pts])
        eta = np.array([q.eta for q in pts])
        eta_m, rms = fit_matched_efficiency(gT, eta, damping_rates(p).gamma_o, p.gamma_m)
        # matched point in the gamma_m -> 0 limit, where the closed form is exactly eta_M
        q = with_damping(p.replace(gamma_m=TWO_PI * 1e-3), gamma_e=TWO_PI * 725, gamma_o=TWO_PI * 725)
        matched = efficiency_report(q).eta
        # with gamma_m = 11 Hz the closed form carries 4 G^2/(2G + g_m)^2
        r = damping_rates(p)
        with_gm = efficiency_report(p).eta / float(closed_form_efficiency(r.gamma_e, r.gamma_o,
                                                                           r.gamma_m, eta_matched(p)))
    ok = (rms < 0.02 and abs(eta_m / eta_matched(p) - 1) < 0.02 and abs(matched / eta_matched(q) - 1) < 0.01
          and abs(with_gm - 1) < 0.01 and t.s < 10)
    report(1, ok, f"fit eta_M={eta_m:.4f} rms={rms:.2%}; matched eta/eta_M-1={matched / eta_matched(q) - 1:+.2%}; "
                  f"{t.s:.1f}s")


def test_c02_eta_m_decomposition():
    e = eta_matched(device_params())
    report(2, 0.419 <= e <= 0.43 and abs(e - 0.43) <= 0.02, f"eta_M={e:.4f}")


def test_c03_induced_absorption():
    with Timer() as t:
        p = device_params()
        d = p.omega_m + TWO_PI * np.linspace(-5000, 5000, 2001)
        low = np.max(np.abs(s_params(with_damping(p, gamma_e=TWO_PI * 50), d).s_oo) ** 2)
        matched = np.max(np.abs(s_params(p, d).s_oo) ** 2)
    report(3, low > 1 > matched and t.s < 10, f"peak |s_oo|^2 low G_e={low:.3f}, matched={matched:.3f}")


def test_c04_maximal_classical_correlations():
    rng = np.random.default_rng(2024)
    worst_rel, worst_eig = 0.0, np.inf
    with Timer() as t:
        for _ in range(100):
            p = random_red_detuned(rng)
            eo = eo_block(spectral_matrix(p, p.omega_m))
            worst_rel = max(worst_rel, abs(abs(eo.c12) / math.sqrt(eo.c11 * eo.c22) - 1))
            worst_eig = min(worst_eig, float(eo.eigen_min))
    ok = worst_rel < 1e-6 and worst_eig >= 0.5 - 1e-9 and t.s < 30
    report(4, ok, f"max rel dev {worst_rel:.1e}, min eigenvalue {worst_eig:.12f}; {t.s:.1f}s")


@pytest.fixture(scope="module")
def fig3_result():
    with Timer() as t:
        res = SCENARIOS["fig3-correlations"](load_config(), 0)
    return res, t.s


def test_c05_fig3_reproduction(fig3_result):
    res, secs = fig3_result
    fits = res.summary["fits"]
    got = [fits[k]["height"] for k in ("microwave", "optical", "cross")]
    target = [69.2, 33.1, 47.7]
    devs = [g / r - 1 for g, r in zip(got, target)]
    resid, err = res.summary["correlation_residual"], res.summary["correlation_residual_err"]
    ok = all(abs(x) <= 0.10 for x in devs) and abs(resid) <= 3 * err and secs < 60
    report(5, ok, "peaks " + "/".join(f"{g:.1f}" for g in got)
           + f" ({', '.join(f'{x:+.1%}' for x in devs)}); residual {resid:+.2f}+-{err:.2f}; {secs:.1f}s")


def test_c06_feedforward_arithmetic():
    b = NoiseBudget(x_oo=33.1 + 2.7, y_oo=33.1 + 2.7, x_ee=69.2 + 29.6 + 2.2, y_ee=69.2 + 29.6 + 2.2,
                    x_eo=47.7, y_eo=47.7)
    p = low_power_params()
    rep = efficiency_report(p)
    cfg = FeedforwardConfig(w=1.6, n_e=29.6, n_o=2.7, gain_a=rep.gain_a, eta=rep.eta)
    x, y = ff_spectrum(b, cfg)
    reduction = 1 - x / b.x_oo
    w_opt = optimal_weight(b, cfg)
    n_add = float(n_add_input_referred(x + y, 2 * 2.7, cfg))
    ok = abs(reduction - 0.59) <= 0.05 and abs(w_opt - 1.57) <= 0.05 and abs(n_add / 38 - 1) <= 0.20
    report(6, ok, f"reduction {reduction:.1%} (target 59%), w*={w_opt:.3f}, N_add={n_add:.1f} "
                  f"(target 38, A*eta={rep.gain_a * rep.eta:.3f})")


def test_c07_quantum_threshold():
    anc = AncillaSpec.perfectly_squeezed()
    at_half = added_noise(0.5, anc)
    at_047 = added_noise(0.47, anc)
    eps = np.finfo(float).eps
    ok = abs(at_half - 0.5) <= 4 * eps and abs(at_047 - 0.53) <= 4 * eps
    report(7, ok, f"added(0.5)-0.5={at_half - 0.5:.1e}, added(0.47)={at_047:.15f}")


def test_c08_microwave_reflection():
    cav = cavity.OnePortCavity(kappa_int=TWO_PI * 0.2e6, kappa_ex=TWO_PI * 2.3e6)
    r = abs(cavity.reflection(cav, 0.0)) ** 2
    report(8, abs(r - 0.706) <= 0.001 and abs(r - 0.69) <= 0.02, f"|S(0)|^2={r:.4f}")


def _etalon_scan():
    stack = cavity.EtalonStack()
    k_int = cavity.fit_kappa_int(stack, TWO_PI * 1.1e6, TWO_PI * 2.1e6)
    xs = np.linspace(0, stack.wavelength, 401)
    s = cavity.etalon_scan(stack, xs, kappa_int=k_int)
    s2 = cavity.etalon_scan(stack, xs + stack.wavelength / 2, kappa_int=k_int)
    return s, s2


def test_c09_etalon_periodicity_and_lower_end():
    with Timer() as t:
        s, s2 = _etalon_scan()
    dev = float(np.max(np.abs(s2.kappa_o / s.kappa_o - 1)))
    lo, hi = s.kappa_o.min() / TWO_PI, s.kappa_o.max() / TWO_PI
    ok = dev < 1e-3 and lo <= 2.1e6 <= hi and t.s < 10
    line = (f"lambda/2 periodicity {dev:.1e}; kappa_o/2pi range {lo / 1e6:.2f}-{hi / 1e6:.2f} MHz; "
            f"2.1 MHz covered; 3 MHz end not reached (see xfail below); {t.s:.1f}s")
    report(9, ok, line)


@pytest.mark.xfail(strict=True, reason="with index 2.0 and 100 nm the scan peaks at 2.77 MHz; "
                                       "3 MHz needs other membrane parameters")
def test_c09_etalon_upper_end_unreached():
    s, _ = _etalon_scan()
    hi = s.kappa_o.max() / TWO_PI
    ACCEPTANCE_LINES.append(f"criterion  9b: FAIL (expected, documented)  max kappa_o/2pi {hi / 1e6:.2f} MHz < 3 MHz")
    assert hi >= 3e6


def test_c10_shift_code():
    with Timer() as t:
        rows = []
        seeds = np.random.SeedSequence(10).generate_state(5)
        for r, s in zip((0.5, 1, 2, 3, 5), seeds):
            res = shiftcode.simulate_fidelity(shiftcode.ShiftCodeParams(r, 1.0, "ideal_fb", 1_000_000), int(s))
            rows.append((r, res))
        ideal8 = shiftcode.simulate_fidelity(shiftcode.ShiftCodeParams(8.0, 1.0, "ideal_fb", 1_000_000), 8)
        cubic8 = shiftcode.simulate_fidelity(shiftcode.ShiftCodeParams(8.0, 1.0, "cubic", 1_000_000), 8)
    zs = [abs(res.f_ent_estimate - res.f_ent_bound) / res.stderr for _, res in rows]
    est = [res.f_ent_estimate for _, res in rows]
    gap = abs(ideal8.f_ent_estimate - cubic8.f_ent_estimate)
    ok = max(zs) < 3 and all(np.diff(est) >= 0) and gap < 1e-3 and t.s < 30
    report(10, ok, f"max |z|={max(zs):.2f}, monotone={all(np.diff(est) >= 0)}, cubic-ideal at 8 sigma={gap:.1e}; "
                   f"{t.s:.1f}s")


def test_c11_dsp_identities():
    p = low_power_params()
    chain = ChainNoise(n_e=29.6, n_o=2.7, excess_e=2.2)
    micro, optical = synthesize_outputs(p, chain, 60.0, 20480.0, seed=7)
    # Parseval: Welch density integrates to the variance
    sp = welch_spectra(micro, nperseg=8192)
    parseval = np.sum(sp.x) * (sp.freq[1] - sp.freq[0]) / np.var(micro.q) - 1
    # narrowband variance against the single-quadrature spectrum at the peak; a 50 Hz band
    # only holds ~3000 independent samples per minute, so q and p of three records are pooled
    w0 = -mechanical_pole(p).imag
    model = quadrature_spectra(p, w0, phase_ref=w0)
    expect = {"e": float(model.x_ee) + chain.n_e + chain.excess_e, "o": float(model.x_oo) + chain.n_o}
    acc = {"e": [], "o": []}
    for seed in (7, 8, 9):
        recs = (micro, optical) if seed == 7 else synthesize_outputs(p, chain, 60.0, 20480.0, seed)
        for key, rec in zip("eo", recs):
            nb = narrowband(rec, 50.0)
            acc[key] += [np.var(nb.q), np.var(nb.p)]
    devs = {k: float(np.mean(v)) / expect[k] - 1 for k, v in acc.items()}
    again = synthesize_outputs(p, chain, 60.0, 20480.0, seed=7)
    same = again[0].q.tobytes() == micro.q.tobytes() and again[1].p.tobytes() == optical.p.tobytes()
    ok = abs(parseval) < 0.01 and all(abs(d) < 0.05 for d in devs.values()) and same
    report(11, ok, f"Parseval {parseval:+.2%}; Var(q)/X^2-1 e {devs['e']:+.2%}, o {devs['o']:+.2%}; "
                   f"byte-exact={same}")
