"""Physical parameters of the three-mode converter and derived damping rates.

Everything is stored as angular frequency (rad/s). Hz-valued inputs are
converted once, at the config boundary (see :mod:`optoconv.config`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Literal

import numpy as np

TWO_PI = 2.0 * math.pi
HBAR = 1.054571817e-34
H_PLANCK = 6.62607015e-34
K_B = 1.380649e-23

Port = Literal["e", "o"]


class ParameterError(ValueError):
    """Raised when a parameter set violates a physical invariant."""


def bose_occupancy(omega: float, temperature: float) -> float:
    """Mean thermal quanta of a mode at angular frequency ``omega``."""
    if temperature < 0:
        raise ParameterError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(HBAR * omega / (K_B * temperature))


def pump_enhanced_coupling(g_single: float, x_zp: float, alpha: float) -> float:
    """Return G * x_zp * alpha, the only combination the model uses.

    ``g_single`` is the frequency pull G (rad/s per metre), ``x_zp`` the
    zero-point amplitude (m) and ``alpha`` the intracavity pump amplitude
    (sqrt of photon number).
    """
    return g_single * x_zp * alpha


@dataclass(frozen=True)
class ConverterParams:
    omega_m: float
    gamma_m: float
    kappa_ex_e: float
    kappa_int_e: float
    kappa_ex_o: float
    kappa_B_o: float
    kappa_int_o: float
    delta_e: float
    delta_o: float
    g_e: float
    g_o: float
    epsilon: float = 1.0
    epsilon_lo: float = 1.0
    n_th_m: float = 0.0
    n_th_e: float = 0.0
    n_th_o: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not np.isfinite(v):
                raise ParameterError(f"{f.name} must be finite, got {v}")
        for name in ("omega_m", "gamma_m", "kappa_ex_e", "kappa_ex_o"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be > 0, got {getattr(self, name)}")
        for name in ("kappa_int_e", "kappa_B_o", "kappa_int_o", "g_e", "g_o",
                     "n_th_m", "n_th_e", "n_th_o"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("epsilon", "epsilon_lo"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {getattr(self, name)}")

    # Totals are derived so the linewidth decompositions cannot drift.
    @property
    def kappa_e(self) -> float:
        return self.kappa_ex_e + self.kappa_int_e

    @property
    def kappa_o(self) -> float:
        return self.kappa_ex_o + self.kappa_B_o + self.kappa_int_o

    def port(self, which: Port) -> tuple[float, float, float]:
        """(coupling, total linewidth, detuning) for the chosen cavity."""
        if which == "e":
            return self.g_e, self.kappa_e, self.delta_e
        if which == "o":
            return self.g_o, self.kappa_o, self.delta_o
        raise ValueError(f"port must be 'e' or 'o', got {which!r}")

    def replace(self, **changes) -> "ConverterParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class DampingRates:
    gamma_e: float
    gamma_o: float
    gamma_m: float

    @property
    def gamma_T(self) -> float:
        return self.gamma_e + self.gamma_o + self.gamma_m


def damping_rate_rwa(g: float, kappa: float) -> float:
    """Resolved-sideband damping rate 4 g^2 / kappa."""
    if kappa <= 0:
        raise ParameterError(f"kappa must be > 0, got {kappa}")
    if g < 0:
        raise ParameterError(f"g must be >= 0, got {g}")
    return 4.0 * g * g / kappa


def _cavity_chi(kappa: float, delta: float, omega):
    return 1.0 / (kappa / 2.0 - 1j * (omega + delta))


def mechanical_self_energy(params: ConverterParams, which: Port, omega=None):
    """Self-energy the pumped cavity ``which`` adds to the mechanical mode.

    With the convention ``omega_eff = omega_m + Sigma`` the real part is the
    spring shift and ``-2 Im Sigma`` the net damping. Both the beam-splitter
    (anti-Stokes) and the two-mode-squeezing (Stokes) channels are kept.
    """
    g, kappa, delta = params.port(which)
    w = params.omega_m if omega is None else omega
    return -1j * g * g * (_cavity_chi(kappa, delta, w) - _cavity_chi(kappa, -delta, w))


def sideband_rates(params: ConverterParams, which: Port) -> tuple[float, float]:
    """(anti-Stokes cooling rate, Stokes heating rate) at omega_m."""
    g, kappa, delta = params.port(which)
    w = params.omega_m
    cool = 2.0 * g * g * _cavity_chi(kappa, delta, w).real
    heat = 2.0 * g * g * _cavity_chi(kappa, -delta, w).real
    return cool, heat


def damping_rate_full(params: ConverterParams, which: Port) -> float:
    """Net parametric damping from the full linearized model at omega_m."""
    return float(-2.0 * mechanical_self_energy(params, which).imag)


def damping_rates(params: ConverterParams) -> DampingRates:
    return DampingRates(
        gamma_e=damping_rate_full(params, "e"),
        gamma_o=damping_rate_full(params, "o"),
        gamma_m=params.gamma_m,
    )


def coupling_for_damping(params: ConverterParams, which: Port, gamma: float) -> float:
    """Pump-enhanced coupling giving full-model damping ``gamma``.

    The damping is exactly quadratic in g, so one evaluation at unit
    coupling fixes the answer.
    """
    if gamma < 0:
        raise ParameterError(f"target damping must be >= 0, got {gamma}")
    unit = params.replace(**{f"g_{which}": 1.0})
    per_g2 = damping_rate_full(unit, which)
    if per_g2 <= 0:
        raise ParameterError(
            f"cavity '{which}' anti-damps the mechanics at this detuning; "
            "no coupling yields positive damping"
        )
    return math.sqrt(gamma / per_g2)


def with_damping(params: ConverterParams, gamma_e: float | None = None,
                 gamma_o: float | None = None) -> ConverterParams:
    """Copy of ``params`` with couplings re-solved for target damping rates."""
    changes = {}
    if gamma_e is not None:
        changes["g_e"] = coupling_for_damping(params, "e", gamma_e)
    if gamma_o is not None:
        changes["g_o"] = coupling_for_damping(params, "o", gamma_o)
    return params.replace(**changes)


def device_params(gamma_e: float | None = TWO_PI * 725.0,
                  gamma_o: float | None = TWO_PI * 725.0,
                  temperature: float | None = None) -> ConverterParams:
    """Device parameters of the eta_M = 0.43 configuration.

    Only the sum kappa_B + kappa_int = 2pi x 1.0 MHz is fixed by the device data; the
    split used here (0.3 / 0.7 MHz) only matters for back-port spectra.
    Couplings are set from the requested full-model damping rates.
    """
    f = TWO_PI
    base = ConverterParams(
        omega_m=f * 1.4732e6,
        gamma_m=f * 11.0,
        kappa_ex_e=f * 2.3e6,
        kappa_int_e=f * 0.2e6,
        kappa_ex_o=f * 1.1e6,
        kappa_B_o=f * 0.3e6,
        kappa_int_o=f * 0.7e6,
        delta_e=f * -1.47e6,
        delta_o=f * -1.11e6,
        g_e=0.0,
        g_o=0.0,
        epsilon=0.87,
        epsilon_lo=0.83,
    )
    if temperature is not None:
        base = base.replace(n_th_m=bose_occupancy(base.omega_m, temperature))
    return with_damping(base, gamma_e=gamma_e, gamma_o=gamma_o)


def low_power_params(temperature: float = 0.087) -> ConverterParams:
    """Low-power noise configuration: matched damping, Gamma_T = 2pi x 200 Hz."""
    gamma = TWO_PI * (200.0 - 11.0) / 2.0
    return device_params(gamma_e=gamma, gamma_o=gamma, temperature=temperature)
