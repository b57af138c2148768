"""Quantum feedforward with a squeezed ancilla: variance bookkeeping and efficiency thresholds.

Single-quadrature photon units: vacuum variance 1/2. The signal enters one
converter port and the ancilla the other; each output carries a fraction
eta of its input, vacuum V from the (1 - eta) loss, and a share of the
common thermal noise. Measuring the ancilla-side output ideally and
displacing the signal output removes the thermal part.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .params import ConverterParams, DampingRates
from .scattering import s_params

VACUUM = 0.5
MAX_SQUEEZING = 20.0


@dataclass(frozen=True)
class AncillaSpec:
    var_q: float
    var_p: float
    kind: str = "custom"

    def __post_init__(self):
        if self.var_q < 0 or self.var_p < 0:
            raise ValueError("variances must be >= 0")
        # r = 20 lands var_q * var_p at 1/4 with a relative error of ~1e-16
        if self.var_q * self.var_p < 0.25 * (1 - 1e-9):
            raise ValueError(f"var_q*var_p = {self.var_q * self.var_p:g} violates the 1/4 floor")

    @classmethod
    def vacuum(cls) -> "AncillaSpec":
        return cls(VACUUM, VACUUM, "vacuum")

    @classmethod
    def squeezed(cls, r: float) -> "AncillaSpec":
        r = min(float(r), MAX_SQUEEZING)
        return cls(VACUUM * math.exp(-2 * r), VACUUM * math.exp(2 * r), f"squeezed(r={r:g})")

    @classmethod
    def perfectly_squeezed(cls) -> "AncillaSpec":
        return cls.squeezed(MAX_SQUEEZING)


def _check_eta(eta):
    e = np.asarray(eta, dtype=float)
    if np.any(e < 0) or np.any(e > 1):
        raise ValueError(f"eta must lie in [0, 1], got {eta}")


def ff_output_variance(eta, signal_var, ancilla: AncillaSpec):
    """eta <q_s^2> + eta <q_a^2> + 2 (1 - eta) <V^2> with <V^2> = 1/2."""
    _check_eta(eta)
    eta = np.asarray(eta, dtype=float)
    out = eta * signal_var + eta * ancilla.var_q + 2.0 * (1.0 - eta) * VACUUM
    return float(out) if out.ndim == 0 else out


def added_noise(eta, ancilla: AncillaSpec):
    """Fed-forward variance minus the transmitted signal eta <q_s^2>."""
    return ff_output_variance(eta, 0.0, ancilla)


def asymmetric_added_noise(eta: float, rho: float, ancilla_var: float = 0.0,
                           n_thermal: float = math.inf) -> float:
    """Added noise when the signal output carries ``rho`` times the ancilla-side thermal noise.

    The ancilla-side output is scaled by a weight w chosen to minimize the
    result; for ``n_thermal = inf`` the weight must cancel the thermal term
    exactly, which forces w = sqrt(rho).
    """
    _check_eta(eta)
    if rho < 0:
        raise ValueError("rho must be >= 0")
    loss = (1.0 - eta) * VACUUM
    anc = eta * ancilla_var
    if math.isinf(n_thermal):
        return loss + rho * (anc + loss)

    def total(w):
        return loss + w * w * (anc + loss) + n_thermal * (math.sqrt(rho) - w) ** 2

    # quadratic in w: closed-form minimizer
    w = n_thermal * math.sqrt(rho) / (anc + loss + n_thermal)
    return total(w)


def threshold_map(noise_asymmetry: float, direction: str = "e->o",
                  n_thermal: float = math.inf) -> float:
    """Efficiency at which fed-forward added noise equals 1/2 photon.

    ``noise_asymmetry`` is (optical thermal noise)/(microwave thermal noise).
    In direction e->o the signal leaves the optical port, so the relevant
    ratio is the asymmetry itself; o->e uses its inverse.
    """
    if noise_asymmetry <= 0:
        raise ValueError("noise_asymmetry must be > 0")
    if direction in ("e->o", "eo"):
        rho = noise_asymmetry
    elif direction in ("o->e", "oe"):
        rho = 1.0 / noise_asymmetry
    else:
        raise ValueError(f"direction must be 'e->o' or 'o->e', got {direction!r}")
    f = lambda eta: asymmetric_added_noise(eta, rho, 0.0, n_thermal) - VACUUM
    if f(1.0) > 0:
        return float("nan")
    if f(0.0) <= 0:
        return 0.0
    return brentq(f, 0.0, 1.0, xtol=1e-14, rtol=4 * np.finfo(float).eps)


def threshold_closed_form(rho: float) -> float:
    """rho / (1 + rho): infinite-thermal threshold with perfect squeezing."""
    return rho / (1.0 + rho)


def bidirectional_threshold(noise_asymmetry: float, n_thermal: float = math.inf) -> float:
    return max(threshold_map(noise_asymmetry, "e->o", n_thermal),
               threshold_map(noise_asymmetry, "o->e", n_thermal))


def noise_asymmetry_from_rates(gammas: DampingRates) -> float:
    """Optical-to-microwave thermal noise ratio Gamma_o / Gamma_e."""
    if gammas.gamma_e <= 0:
        raise ValueError("gamma_e must be > 0")
    return gammas.gamma_o / gammas.gamma_e


def optimal_threshold_asymmetry() -> float:
    """Asymmetry minimizing the bidirectional threshold (numerically; it is 1)."""
    res = minimize_scalar(lambda lr: bidirectional_threshold(math.exp(lr)),
                          bounds=(-5, 5), method="bounded", options={"xatol": 1e-10})
    return math.exp(res.x)


def reflection_warning(params: ConverterParams, delta: float | None = None,
                       threshold: float = 0.05) -> dict[str, float]:
    """On-resonance reflection magnitudes; warns when either exceeds ``threshold``.

    Reflected signal is fed forward along with the noise, which the
    variance formulas above ignore.
    """
    d = params.omega_m if delta is None else delta
    s = s_params(params, d)
    refl = {"s_ee_sq": float(abs(s.s_ee) ** 2), "s_oo_sq": float(abs(s.s_oo) ** 2)}
    bad = {k: v for k, v in refl.items() if v > threshold}
    if bad:
        warnings.warn(f"port reflection {bad} exceeds {threshold:g}; fed-forward variance "
                      "formulas assume impedance-matched ports", RuntimeWarning, stacklevel=2)
    return refl
