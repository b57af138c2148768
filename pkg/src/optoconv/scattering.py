"""Linearized input-output model of the electro-optomechanical converter.

Frame rotating at each pump; a = optical, b = microwave, c = mechanics::

    da/dt = (i D_o - k_o/2) a + i g_o (c + c+) + sum_p sqrt(k_p) a_in,p
    db/dt = (i D_e - k_e/2) b + i g_e (c + c+) + sum_q sqrt(k_q) b_in,q
    dc/dt = (-i w_m - g_m/2) c + i g_o (a + a+) + i g_e (b + b+) + sqrt(g_m) c_in

Fourier convention a(t) = int a(w) exp(-i w t) dw, so a probe at pump + delta
sits at w = delta, and a+(w) means [a(-w)]+. Outputs follow
out = in - sqrt(k_port) * mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .params import ConverterParams, damping_rates, sideband_rates

# Row order of Xi (and of the 6x6 spectral matrix).
OUT_B, OUT_F, OUT_E = 0, 1, 2
OUTPUT_LABELS = ("a_out,B", "a_out,F", "b_out", "a+_out,B", "a+_out,F", "b+_out")
# Column order of Xi; the conjugate inputs follow at +6.
IN_B, IN_F, IN_O_INT, IN_E_EX, IN_E_INT, IN_M = range(6)
INPUT_LABELS = ("a_in,B", "a_in,F", "a_in,int", "b_in,ex", "b_in,int", "c_in")

_MODE_A, _MODE_B, _MODE_C = 0, 1, 2
_OUTPUT_PORTS = ((OUT_B, IN_B, _MODE_A), (OUT_F, IN_F, _MODE_A), (OUT_E, IN_E_EX, _MODE_B))

STABILITY_MARGIN = 1e-9


class UnstableConfigurationError(RuntimeError):
    """The linearized dynamics have a pole in the right half-plane."""


@dataclass(frozen=True)
class ScatteringMatrix:
    """Xi(omega): 6 output operators in terms of 12 input operators.

    ``xi`` has shape (6, 12) for scalar ``omega`` or (N, 6, 12) for an array.
    """

    omega: float | np.ndarray
    xi: np.ndarray

    def entry(self, row: int, col: int):
        return self.xi[..., row, col]


@dataclass(frozen=True)
class SParams:
    delta: float | np.ndarray
    s_ee: complex | np.ndarray
    s_oo: complex | np.ndarray
    s_oe: complex | np.ndarray
    s_eo: complex | np.ndarray


@dataclass(frozen=True)
class EfficiencyReport:
    eta: float
    eta_m: float
    gain_a: float
    t_sq: float
    bandwidth: float
    delta_peak: float


@dataclass(frozen=True)
class EfficiencyPoint:
    gamma_e: float
    gamma_T: float
    eta: float
    eta_closed: float
    t_sq: float
    gain_a: float


def _port_rates(params: ConverterParams) -> tuple[float, ...]:
    return (params.kappa_B_o, params.kappa_ex_o, params.kappa_int_o,
            params.kappa_ex_e, params.kappa_int_e, params.gamma_m)


_INPUT_MODES = (_MODE_A, _MODE_A, _MODE_A, _MODE_B, _MODE_B, _MODE_C)


def drift_matrix(params: ConverterParams, rwa: bool = False) -> np.ndarray:
    """6x6 drift matrix acting on (a, b, c, a+, b+, c+).

    With ``rwa`` the counter-rotating (two-mode-squeezing) couplings are
    dropped, leaving pure beam-splitter interactions.
    """
    p = params
    m = np.zeros((6, 6), dtype=complex)
    m[0, 0] = 1j * p.delta_o - p.kappa_o / 2
    m[1, 1] = 1j * p.delta_e - p.kappa_e / 2
    m[2, 2] = -1j * p.omega_m - p.gamma_m / 2
    for k in range(3):
        m[k + 3, k + 3] = np.conj(m[k, k])
    for cav, g in ((_MODE_A, p.g_o), (_MODE_B, p.g_e)):
        c = _MODE_C
        # cavity <- mechanics and mechanics <- cavity, plus conjugate rows
        m[cav, c] += 1j * g
        m[c, cav] += 1j * g
        m[cav + 3, c + 3] -= 1j * g
        m[c + 3, cav + 3] -= 1j * g
        if not rwa:
            m[cav, c + 3] += 1j * g
            m[c, cav + 3] += 1j * g
            m[cav + 3, c] -= 1j * g
            m[c + 3, cav] -= 1j * g
    return m


def input_coupling(params: ConverterParams) -> np.ndarray:
    k = np.zeros((6, 12))
    for col, (rate, mode) in enumerate(zip(_port_rates(params), _INPUT_MODES)):
        k[mode, col] = math.sqrt(rate)
        k[mode + 3, col + 6] = math.sqrt(rate)
    return k


def check_stability(params: ConverterParams, rwa: bool = False) -> np.ndarray:
    """Return the drift eigenvalues, raising if any is not decaying."""
    eig = np.linalg.eigvals(drift_matrix(params, rwa=rwa))
    worst = eig.real.max()
    if worst >= -STABILITY_MARGIN * params.omega_m:
        raise UnstableConfigurationError(
            f"unstable configuration: drift eigenvalue with real part {worst:.3e} rad/s"
        )
    return eig


def mechanical_pole(params: ConverterParams, rwa: bool = False) -> complex:
    """Drift eigenvalue of the dressed mechanical mode (positive frequency)."""
    eig = check_stability(params, rwa=rwa)
    cand = eig[-eig.imag > 0]
    return complex(cand[np.argmax(cand.real)])


def build_xi(params: ConverterParams, omega, rwa: bool = False,
             check: bool = True) -> ScatteringMatrix:
    """Scattering matrix at one frequency or an array of frequencies."""
    if check:
        check_stability(params, rwa=rwa)
    w = np.asarray(omega, dtype=float)
    flat = np.atleast_1d(w).ravel()
    m = drift_matrix(params, rwa=rwa)
    k = input_coupling(params)
    lhs = -1j * flat[:, None, None] * np.eye(6) - m
    modes = np.linalg.solve(lhs, np.broadcast_to(k, (flat.size, 6, 12)))
    rates = _port_rates(params)
    xi = np.zeros((flat.size, 6, 12), dtype=complex)
    for row, col, mode in _OUTPUT_PORTS:
        root = math.sqrt(rates[col])
        xi[:, row, :] = -root * modes[:, mode, :]
        xi[:, row, col] += 1.0
        xi[:, row + 3, :] = -root * modes[:, mode + 3, :]
        xi[:, row + 3, col + 6] += 1.0
    xi = xi.reshape(w.shape + (6, 12))
    return ScatteringMatrix(omega=omega, xi=xi)


def s_params(params: ConverterParams, delta, rwa: bool = False) -> SParams:
    """Probe scattering parameters at detuning ``delta`` from the pump.

    The front optical port sees mode matching eps on the way in and out.
    Mode-mismatched light reflects promptly, so normalized to the
    off-resonant level the optical reflection is 1 + eps (Xi_FF - 1).
    """
    xi = build_xi(params, delta, rwa=rwa).xi
    eps = params.epsilon
    root = math.sqrt(eps)
    return SParams(
        delta=delta,
        s_ee=xi[..., OUT_E, IN_E_EX],
        s_oo=1.0 + eps * (xi[..., OUT_F, IN_F] - 1.0),
        s_oe=root * xi[..., OUT_F, IN_E_EX],
        s_eo=root * xi[..., OUT_E, IN_F],
    )


def eta_matched(params: ConverterParams) -> float:
    """Matched-damping efficiency eps (k_ex,o/k_o)(k_ex,e/k_e)."""
    return params.epsilon * (params.kappa_ex_o / params.kappa_o) * (params.kappa_ex_e / params.kappa_e)


def port_gain(params: ConverterParams, which: str) -> float:
    """Amplification from imperfect sideband resolution on one port.

    Ratio of the beam-splitter-only (RWA) damping to the net damping of the
    full model; independent of the coupling strength, so it is defined
    even with the pump off.
    """
    unit = params.replace(**{f"g_{which}": 1.0})
    cool, heat = sideband_rates(unit, which)
    net = cool - heat
    if net <= 0:
        raise UnstableConfigurationError(f"port '{which}' has no net damping")
    return cool / net


def gain_a(params: ConverterParams) -> float:
    """Converter gain: product of the two per-port amplification factors."""
    return port_gain(params, "e") * port_gain(params, "o")


def closed_form_efficiency(gamma_e, gamma_o, gamma_m, eta_m):
    """4 G_e G_o / (G_e + G_o + g_m)^2 * eta_M."""
    gamma_e = np.asarray(gamma_e, dtype=float)
    return 4.0 * gamma_e * gamma_o / (gamma_e + gamma_o + gamma_m) ** 2 * eta_m


def _transmission(params: ConverterParams, delta: float) -> float:
    return float(abs(s_params(params, delta).s_oe) ** 2)


def efficiency_report(params: ConverterParams) -> EfficiencyReport:
    """Peak conversion, its FWHM, and the gain-corrected efficiency."""
    pole = mechanical_pole(params)
    centre = -pole.imag
    gamma_T = damping_rates(params).gamma_T
    lo, hi = centre - 2 * gamma_T, centre + 2 * gamma_T
    res = minimize_scalar(lambda d: -_transmission(params, d), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-6 * gamma_T})
    d_peak = float(res.x)
    t_sq = -float(res.fun)
    if t_sq <= 0:
        bandwidth = float("nan")
    else:
        half = lambda d: _transmission(params, d) - t_sq / 2
        left = brentq(half, d_peak - 20 * gamma_T, d_peak, xtol=1e-9 * gamma_T)
        right = brentq(half, d_peak, d_peak + 20 * gamma_T, xtol=1e-9 * gamma_T)
        bandwidth = right - left
    a = gain_a(params)
    return EfficiencyReport(eta=t_sq / a, eta_m=eta_matched(params), gain_a=a,
                            t_sq=t_sq, bandwidth=bandwidth, delta_peak=d_peak)


def efficiency_curve(params: ConverterParams, gamma_e_grid) -> list[EfficiencyPoint]:
    """Full-model and closed-form efficiency while sweeping Gamma_e.

    Gamma_o stays whatever ``params`` already implies.
    """
    from .params import with_damping

    gamma_o = damping_rates(params).gamma_o
    eta_m = eta_matched(params)
    out = []
    for ge in gamma_e_grid:
        p = with_damping(params, gamma_e=float(ge))
        rep = efficiency_report(p)
        out.append(EfficiencyPoint(
            gamma_e=float(ge),
            gamma_T=float(ge) + gamma_o + p.gamma_m,
            eta=rep.eta,
            eta_closed=float(closed_form_efficiency(ge, gamma_o, p.gamma_m, eta_m)),
            t_sq=rep.t_sq,
            gain_a=rep.gain_a,
        ))
    return out


def fit_matched_efficiency(gamma_T, eta, gamma_o: float, gamma_m: float) -> tuple[float, float]:
    """Least-squares eta_M for the closed form; returns (eta_M, rms relative residual)."""
    gamma_T = np.asarray(gamma_T, dtype=float)
    eta = np.asarray(eta, dtype=float)
    shape = 4.0 * (gamma_T - gamma_o - gamma_m) * gamma_o / gamma_T**2
    eta_m = float(np.dot(shape, eta) / np.dot(shape, shape))
    rel = (eta - eta_m * shape) / (eta_m * shape)
    return eta_m, float(np.sqrt(np.mean(rel**2)))
