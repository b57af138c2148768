"""Calibration fits: Lorentzian peaks, thermal sweeps and the amplifier-chain coth model.

Nonlinear fits use scipy's Levenberg-Marquardt (``least_squares``,
method="lm") with analytic Jacobians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, least_squares

from ..correlations import quadrature_spectra
from ..params import H_PLANCK, K_B, ConverterParams, bose_occupancy

FTOL = 1e-10


class FitError(RuntimeError):
    """A fit did not converge or its input is degenerate."""


@dataclass(frozen=True)
class LorentzianFit:
    success: bool
    center: float = float("nan")
    fwhm: float = float("nan")
    height: float = float("nan")
    background: float = float("nan")
    covariance: np.ndarray | None = None
    residual_rms: float = float("nan")
    message: str = ""

    @property
    def stderr(self) -> np.ndarray:
        if self.covariance is None:
            return np.full(4, np.nan)
        return np.sqrt(np.diag(self.covariance))


@dataclass(frozen=True)
class CalibrationFit:
    """Thermal-sweep calibration (photons per raw unit) or amplifier-chain fit."""

    calib_factor: float = float("nan")
    n_background: float = float("nan")
    slope_per_kelvin: float = float("nan")
    gain: float = float("nan")
    n_hemt: float = float("nan")
    covariance: np.ndarray | None = None
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    excluded: tuple[int, ...] = ()


def lorentzian(f, center, fwhm, height, background):
    return height / (1.0 + (2.0 * (f - center) / fwhm) ** 2) + background


def _lorentz_jac(f, center, fwhm, height, background):
    u = 2.0 * (f - center) / fwhm
    d = 1.0 / (1.0 + u * u)
    dd = -height * d * d * 2.0 * u  # derivative of height*d w.r.t. u
    return np.column_stack([
        dd * (-2.0 / fwhm),
        dd * (-u / fwhm),
        d,
        np.ones_like(f),
    ])


def lorentzian_fit(freq, spectrum, sigma=None, min_snr: float = 3.0) -> LorentzianFit:
    """Least-squares Lorentzian plus constant background.

    Returns ``success=False`` (never raises) when there is no resolvable peak.
    """
    f = np.asarray(freq, dtype=float)
    s = np.asarray(spectrum, dtype=float)
    w = np.ones_like(s) if sigma is None else 1.0 / np.asarray(sigma, dtype=float)
    if f.size < 5:
        return LorentzianFit(False, message="need at least 5 points")
    bg = float(np.median(s))
    noise = 1.4826 * float(np.median(np.abs(s - bg)))
    k = int(np.argmax(s))
    h = float(s[k] - bg)
    if not h > min_snr * max(noise, 1e-300 * abs(bg)):
        return LorentzianFit(False, message=f"no peak above {min_snr:g} sigma of the background")
    above = s - bg > h / 2
    # contiguous half-maximum run around the maximum
    lo = k
    while lo > 0 and above[lo - 1]:
        lo -= 1
    hi = k
    while hi < f.size - 1 and above[hi + 1]:
        hi += 1
    step = float(np.median(np.diff(f)))
    x0 = np.array([f[k], max(f[hi] - f[lo], step), h, bg])
    resid = lambda x: (lorentzian(f, *x) - s) * w
    jac = lambda x: _lorentz_jac(f, *x) * w[:, None]
    try:
        res = least_squares(resid, x0, jac=jac, method="lm", ftol=FTOL, xtol=FTOL, gtol=FTOL,
                            x_scale=np.abs(x0) + step)
    except (ValueError, np.linalg.LinAlgError) as exc:
        return LorentzianFit(False, message=f"fit failed: {exc}")
    if not res.success or res.x[1] == 0:
        return LorentzianFit(False, message=res.message)
    dof = max(1, f.size - 4)
    chi2 = float(np.sum(res.fun**2))
    try:
        cov = np.linalg.inv(res.jac.T @ res.jac)
        cov *= chi2 / dof if sigma is None else 1.0
    except np.linalg.LinAlgError:
        cov = None
    c, fw, ht, b = res.x
    return LorentzianFit(True, float(c), float(abs(fw)), float(ht), float(b), cov,
                         float(math.sqrt(chi2 / f.size)), str(res.message))


def thermal_peak_model(params: ConverterParams, temperature, port: str = "e") -> np.ndarray:
    """Predicted single-quadrature thermal peak (photons) at each bath temperature."""
    temps = np.atleast_1d(np.asarray(temperature, dtype=float))
    out = np.empty(temps.size)
    w = params.omega_m
    for i, t in enumerate(temps):
        p = params.replace(n_th_m=bose_occupancy(w, t))
        # the dressed resonance sits within a few Hz of omega_m
        spec = quadrature_spectra(p, _peak_omega(p), phase_ref=_peak_omega(p))
        out[i] = spec.x_ee if port == "e" else spec.x_oo
    return out if np.ndim(temperature) else out[0]


def _peak_omega(params: ConverterParams) -> float:
    from ..scattering import mechanical_pole

    return -mechanical_pole(params).imag


def thermal_sweep_fit(temperatures, peaks, predicted, sigma=None,
                      exclude_sigma: float = 3.0, min_points: int = 3) -> CalibrationFit:
    """One-parameter proportional fit of normalized peak heights to the model.

    ``peaks`` are in units of the pump-off background, so the fitted
    photons-per-unit factor is also the single-quadrature background.
    Points at the lowest temperatures are dropped one at a time while they
    deviate by more than ``exclude_sigma``.
    """
    t = np.asarray(temperatures, dtype=float)
    y = np.asarray(peaks, dtype=float)
    m = np.asarray(predicted, dtype=float)
    if not (t.shape == y.shape == m.shape):
        raise ValueError("temperatures, peaks and predicted must have equal length")
    s = np.ones_like(y) if sigma is None else np.asarray(sigma, dtype=float)
    order = np.argsort(t)
    keep = np.ones(t.size, dtype=bool)
    excluded: list[int] = []

    def fit(mask):
        ww = 1.0 / s[mask] ** 2
        # y = m / calib  ->  slope a = 1/calib
        a = float(np.sum(ww * m[mask] * y[mask]) / np.sum(ww * m[mask] ** 2))
        r = (y - a * m) / s
        if sigma is None:
            scale = float(np.sqrt(np.sum(r[mask] ** 2) / max(1, mask.sum() - 1)))
            r = r / scale if scale > 0 else r
        return a, r

    if keep.sum() < min_points:
        raise FitError(f"need at least {min_points} temperature points")
    a, r = fit(keep)
    for idx in order:
        if keep.sum() <= min_points:
            break
        # judge the candidate against a fit that does not include it
        trial = keep.copy()
        trial[idx] = False
        a_t, r_t = fit(trial)
        if abs(r_t[idx]) > exclude_sigma:
            keep = trial
            excluded.append(int(idx))
            a, r = a_t, r_t
        else:
            break
    if keep.sum() < min_points:
        raise FitError("too few equilibrated points left after exclusion")
    if not a > 0:
        raise FitError("non-positive calibration slope")
    calib = 1.0 / a
    # slope of normalized peak vs T from the model's local proportionality
    slope = float(np.polyfit(t[keep], a * m[keep], 1)[0]) if keep.sum() > 1 else float("nan")
    return CalibrationFit(calib_factor=calib, n_background=calib, slope_per_kelvin=slope,
                          residuals=y - a * m, excluded=tuple(excluded))


def bath_temperature(params: ConverterParams, peak_photons: float, port: str = "e",
                     t_max: float = 10.0) -> float:
    """Bath temperature whose predicted thermal peak equals ``peak_photons``."""
    g = lambda t: float(thermal_peak_model(params, t, port)) - peak_photons
    lo = 1e-4
    if g(lo) > 0:
        raise FitError("peak is below the zero-temperature prediction")
    if g(t_max) < 0:
        raise FitError(f"peak implies a bath hotter than {t_max} K")
    return brentq(g, lo, t_max, xtol=1e-9)


def hemt_model(temperature, f: float, gain: float, n_hemt: float):
    x = H_PLANCK * f / (2.0 * K_B * np.asarray(temperature, dtype=float))
    return gain * (0.5 / np.tanh(x) + n_hemt)


def hemt_fit(temperatures, s_out, f: float, sigma=None) -> CalibrationFit:
    """Fit S_out = G (coth(hf/2kT)/2 + N_HEMT) for gain G and added noise N_HEMT."""
    t = np.asarray(temperatures, dtype=float)
    y = np.asarray(s_out, dtype=float)
    if t.size < 3:
        raise FitError("need at least 3 temperatures")
    w = np.ones_like(y) if sigma is None else 1.0 / np.asarray(sigma, dtype=float)
    c = 0.5 / np.tanh(H_PLANCK * f / (2.0 * K_B * t))
    # linear in (G, G N): seed the nonlinear fit with the exact linear solve
    A = np.column_stack([c, np.ones_like(c)]) * w[:, None]
    (g0, gn0), *_ = np.linalg.lstsq(A, y * w, rcond=None)
    if not g0 > 0:
        raise FitError("temperature sweep does not constrain the gain")
    x0 = np.array([g0, gn0 / g0])
    resid = lambda x: (x[0] * (c + x[1]) - y) * w
    jac = lambda x: np.column_stack([c + x[1], np.full_like(c, x[0])]) * w[:, None]
    res = least_squares(resid, x0, jac=jac, method="lm", ftol=FTOL, xtol=FTOL, gtol=FTOL)
    if not res.success:
        raise FitError(f"coth fit did not converge: {res.message}; "
                       f"rms residual {np.sqrt(np.mean(res.fun**2)):.3g}")
    chi2 = float(np.sum(res.fun**2))
    cov = np.linalg.inv(res.jac.T @ res.jac)
    if sigma is None:
        cov *= chi2 / max(1, t.size - 2)
    return CalibrationFit(gain=float(res.x[0]), n_hemt=float(res.x[1]), covariance=cov,
                          residuals=-res.fun / w)
