"""Output noise spectra of the converter and electro-optic correlation diagnostics.

C(omega) = Xi* (Sigma + I/2) Xi^T with symmetrized ordering, so a vacuum
input contributes 1/2 on the diagonal. Rows/columns follow the Xi output
order of :mod:`optoconv.scattering`. Measurement-chain noise is not part of
C; it enters in :mod:`optoconv.dsp` and :mod:`optoconv.feedforward`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ConverterParams, DampingRates
from .scattering import OUT_E, OUT_F, build_xi


@dataclass(frozen=True)
class SpectralMatrix:
    omega: float | np.ndarray
    c: np.ndarray
    thermal_part: np.ndarray
    quantum_part: np.ndarray


@dataclass(frozen=True)
class EoCorrelation:
    """Optical-front / microwave block; c11, c22, c12 are above vacuum."""

    c11: float | np.ndarray
    c22: float | np.ndarray
    c12: complex | np.ndarray
    eigen_min: float | np.ndarray

    @property
    def phase(self):
        return np.angle(self.c12)

    @property
    def c12_real(self):
        """|c12|: cross term after rotating the demodulation phases to make it real."""
        return np.abs(self.c12)

    @property
    def max_classical(self):
        return np.sqrt(self.c11 * self.c22)


@dataclass(frozen=True)
class QuadratureSpectra:
    """Single-quadrature spectra above vacuum, as seen after the front-port mode matching."""

    omega: float | np.ndarray
    x_ee: float | np.ndarray
    x_oo: float | np.ndarray
    x_eo: float | np.ndarray
    y_eo: float | np.ndarray


def bath_vector(params: ConverterParams) -> np.ndarray:
    """Diagonal of Sigma: occupancies of the 12 input operators."""
    n = np.array([params.n_th_o] * 3 + [params.n_th_e] * 2 + [params.n_th_m])
    return np.concatenate([n, n])


def spectral_matrix(params: ConverterParams, omega, rwa: bool = False) -> SpectralMatrix:
    xi = build_xi(params, omega, rwa=rwa).xi
    xc = np.conj(xi)
    xt = np.swapaxes(xi, -1, -2)
    quantum = 0.5 * (xc @ xt)
    thermal = (xc * bath_vector(params)) @ xt
    return SpectralMatrix(omega=omega, c=quantum + thermal,
                          thermal_part=thermal, quantum_part=quantum)


def eo_block(spectral: SpectralMatrix) -> EoCorrelation:
    c = spectral.c
    a = c[..., OUT_F, OUT_F].real
    d = c[..., OUT_E, OUT_E].real
    b = c[..., OUT_F, OUT_E]
    # smallest eigenvalue of the Hermitian 2x2 block, in closed form
    lam = 0.5 * (a + d) - np.sqrt(0.25 * (a - d) ** 2 + np.abs(b) ** 2)
    return EoCorrelation(c11=a - 0.5, c22=d - 0.5, c12=b, eigen_min=lam)


def ctherm_closed_form(gammas: DampingRates, n_th_m: float) -> np.ndarray:
    """Resolved-sideband thermal block (optical first, microwave second)."""
    ge, go = gammas.gamma_e, gammas.gamma_o
    pref = 4.0 * n_th_m * gammas.gamma_m / gammas.gamma_T ** 2
    cross = math.sqrt(go * ge)
    return pref * np.array([[go, cross], [cross, ge]])


def quadrature_spectra(params: ConverterParams, omega, phase_ref: float | None = None,
                       rwa: bool = False) -> QuadratureSpectra:
    """Converter-referred single-quadrature spectra X_e^2, X_o^2, X_e X_o.

    The noise is phase insensitive, so each quadrature carries half of the
    above-vacuum two-quadrature spectrum and <Y_e Y_o> = <X_e X_o>. The
    demodulation phases are fixed once so that the cross term is real at
    ``phase_ref`` (default: the bare mechanical frequency).
    """
    eo = eo_block(spectral_matrix(params, omega, rwa=rwa))
    ref = params.omega_m if phase_ref is None else phase_ref
    phi = float(eo_block(spectral_matrix(params, ref, rwa=rwa)).phase)
    eps = params.epsilon
    cross = 0.5 * math.sqrt(eps) * np.real(eo.c12 * np.exp(-1j * phi))
    return QuadratureSpectra(omega=omega, x_ee=0.5 * eo.c22, x_oo=0.5 * eps * eo.c11,
                             x_eo=cross, y_eo=cross)
