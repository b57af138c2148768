"""Averaged-periodogram quadrature spectra (X^2, Y^2 and cross terms)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import csd, welch

from .traces import QuadratureTrace


@dataclass(frozen=True)
class QuadratureSpectra:
    """Two-sided densities versus offset ``freq`` (Hz) from the demod frequency.

    ``x``/``y`` are single-quadrature spectra of the first trace; the cross
    fields are Re <X_1 X_2> and Re <Y_1 Y_2> when a second trace was given.
    Multiply by ``calib`` (photons per raw unit) to calibrate.
    """

    freq: np.ndarray
    x: np.ndarray
    y: np.ndarray
    n_segments: int
    x_other: np.ndarray | None = None
    y_other: np.ndarray | None = None
    x_cross: np.ndarray | None = None
    y_cross: np.ndarray | None = None

    @property
    def total(self) -> np.ndarray:
        return self.x + self.y

    def x_err(self) -> np.ndarray:
        return self.x / np.sqrt(self.n_segments)

    def cross_err(self) -> np.ndarray:
        """1-sigma error of x_cross for Gaussian records."""
        if self.x_cross is None:
            raise ValueError("no cross spectrum was computed")
        var = (self.x * self.x_other + self.x_cross**2) / (2.0 * self.n_segments)
        return np.sqrt(var)

    def scaled(self, calib: float) -> "QuadratureSpectra":
        s = lambda a: None if a is None else a * calib
        return QuadratureSpectra(self.freq, self.x * calib, self.y * calib, self.n_segments,
                                 s(self.x_other), s(self.y_other), s(self.x_cross), s(self.y_cross))

    def band(self, lo: float, hi: float) -> np.ndarray:
        return (self.freq >= lo) & (self.freq <= hi)


def _density(a, b, fs, nperseg, window):
    if b is None:
        f, s = welch(a, fs=fs, window=window, nperseg=nperseg, return_onesided=False,
                     scaling="density", detrend=False)
    else:
        f, s = csd(a, b, fs=fs, window=window, nperseg=nperseg, return_onesided=False,
                   scaling="density", detrend=False)
        s = s.real
    order = np.argsort(f)
    return f[order], s[order]


def quadrature_spectra(trace: QuadratureTrace, other: QuadratureTrace | None = None,
                       nperseg: int | None = None, window: str = "hann") -> QuadratureSpectra:
    n = trace.n
    nperseg = n if nperseg is None else int(nperseg)
    if nperseg > n:
        raise ValueError(f"nperseg={nperseg} exceeds the record length {n}")
    if nperseg & (nperseg - 1):
        warnings.warn(f"nperseg={nperseg} is not a power of two; FFTs will be slower",
                      RuntimeWarning, stacklevel=2)
    if other is not None and other.n != n:
        raise ValueError("traces must have equal length")
    fs = trace.fs
    f, sx = _density(trace.q, None, fs, nperseg, window)
    _, sy = _density(trace.p, None, fs, nperseg, window)
    # 50% overlap (scipy default) gives about 2n/nperseg - 1 segments
    segments = max(1, 2 * n // nperseg - 1)
    if other is None:
        return QuadratureSpectra(f, sx, sy, segments)
    _, ox = _density(other.q, None, fs, nperseg, window)
    _, oy = _density(other.p, None, fs, nperseg, window)
    _, cx = _density(trace.q, other.q, fs, nperseg, window)
    _, cy = _density(trace.p, other.p, fs, nperseg, window)
    return QuadratureSpectra(f, sx, sy, segments, ox, oy, cx, cy)


def complex_spectrum(trace: QuadratureTrace, nperseg: int | None = None,
                     window: str = "hann") -> tuple[np.ndarray, np.ndarray]:
    """Two-sided density of z = q + i p (photons), sorted by frequency."""
    nperseg = trace.n if nperseg is None else int(nperseg)
    f, s = welch(trace.z, fs=trace.fs, window=window, nperseg=nperseg,
                 return_onesided=False, scaling="density", detrend=False)
    order = np.argsort(f)
    return f[order], s[order].real
