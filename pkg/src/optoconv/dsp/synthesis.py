"""Monte-Carlo forward model of the two heterodyne output records.

Frequency-domain colouring: every input port gets independent complex
Gaussians per frequency bin with E|u|^2 = n + 1/2, which are propagated
through Xi. One draw of the mechanical bath feeds both outputs, so the
electro-optic correlations are physical. Chain noise is white except for a
Lorentzian microwave excess centred on the LC resonance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..correlations import bath_vector
from ..params import TWO_PI, ConverterParams, damping_rates
from ..scattering import IN_E_EX, IN_F, OUT_E, OUT_F, build_xi, check_stability, mechanical_pole
from .traces import QuadratureTrace

_CHUNK = 1 << 14


@dataclass(frozen=True)
class ChainNoise:
    """Single-quadrature chain backgrounds (vacuum included) and microwave excess.

    ``excess_e`` is the single-quadrature excess at the mechanical frequency.
    """

    n_e: float = 0.5
    n_o: float = 0.5
    excess_e: float = 0.0

    def __post_init__(self):
        if self.n_e < 0.5 or self.n_o < 0.5:
            raise ValueError("chain backgrounds must be >= 1/2 photon (single-quadrature vacuum)")
        if self.excess_e < 0:
            raise ValueError("excess_e must be >= 0")


@dataclass(frozen=True)
class Tone:
    """Coherent probe of ``flux`` photons/s at ``offset`` Hz from the demod frequency."""

    port: str  # "e" or "o"
    offset: float
    flux: float
    phase: float = 0.0


def _excess_shape(params: ConverterParams, omega):
    lor = lambda w: 1.0 / (1.0 + (2.0 * (w + params.delta_e) / params.kappa_e) ** 2)
    return lor(omega) / lor(params.omega_m)


def demod_frequency(params: ConverterParams) -> float:
    """Dressed mechanical frequency (Hz) offset from the pump."""
    return -mechanical_pole(params).imag / TWO_PI


def synthesize_outputs(params: ConverterParams, chain: ChainNoise, duration: float,
                       fs: float, seed: int, f_offset: float | None = None,
                       tones: tuple[Tone, ...] = ()) -> tuple[QuadratureTrace, QuadratureTrace]:
    """Return (microwave, optical) traces demodulated near the mechanical frequency.

    ``f_offset`` is the demodulation frequency relative to each pump (Hz);
    it defaults to the dressed mechanical frequency. The optical record
    includes the front-port mode matching. Tones at an offset that is not
    on the FFT grid are rounded to the nearest bin.
    """
    check_stability(params)
    n = int(round(duration * fs))
    if n < 16:
        raise ValueError("record too short: fewer than 16 samples")
    gamma_T = damping_rates(params).gamma_T
    if duration < 10.0 / gamma_T:
        warnings.warn(f"duration {duration:g}s is shorter than 10/Gamma_T; spectra will be biased",
                      RuntimeWarning, stacklevel=2)
    f0 = demod_frequency(params) if f_offset is None else f_offset
    freqs = np.fft.fftfreq(n, 1.0 / fs)
    omega = TWO_PI * (f0 + freqs)
    rng = np.random.default_rng(seed)
    sd = np.sqrt((bath_vector(params) + 0.5) / 2.0)
    eps = params.epsilon

    z_e = np.empty(n, dtype=complex)
    z_o = np.empty(n, dtype=complex)
    # every Xi chunk consumes the same number of draws, independent of content
    for start in range(0, n, _CHUNK):
        sl = slice(start, min(start + _CHUNK, n))
        m = sl.stop - sl.start
        u = (rng.standard_normal((m, 12)) + 1j * rng.standard_normal((m, 12))) * sd
        xi = build_xi(params, omega[sl], check=False).xi
        z_e[sl] = np.einsum("kj,kj->k", xi[:, OUT_E, :], u)
        z_o[sl] = math.sqrt(eps) * np.einsum("kj,kj->k", xi[:, OUT_F, :], u)

    def white(var):
        return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * math.sqrt(var / 2.0)

    z_o += white(2.0 * chain.n_o - eps / 2.0)
    z_e += white(2.0 * chain.n_e - 0.5)
    if chain.excess_e > 0:
        z_e += white(2.0 * chain.excess_e) * np.sqrt(_excess_shape(params, omega))

    scale = math.sqrt(n * fs)
    z_e = np.fft.ifft(z_e * scale)
    z_o = np.fft.ifft(z_o * scale)

    t = np.arange(n) / fs
    for tone in tones:
        k = int(round(tone.offset * n / fs)) % n
        f_tone = freqs[k]
        w = np.array([TWO_PI * (f0 + f_tone)])
        xi = build_xi(params, w, check=False).xi[0]
        col = IN_E_EX if tone.port == "e" else IN_F if tone.port == "o" else None
        if col is None:
            raise ValueError(f"tone port must be 'e' or 'o', got {tone.port!r}")
        amp = math.sqrt(tone.flux) * np.exp(1j * tone.phase)
        if tone.port == "o":
            amp *= math.sqrt(eps)
        carrier = np.exp(2j * np.pi * f_tone * t)
        z_e += xi[OUT_E, col] * amp * carrier
        z_o += math.sqrt(eps) * xi[OUT_F, col] * amp * carrier
        if tone.port == "o":
            # mode-mismatched light reflects promptly off the front mirror
            z_o += (1.0 - eps) * math.sqrt(tone.flux) * np.exp(1j * tone.phase) * carrier

    micro = QuadratureTrace.from_complex(z_e, 1.0 / fs, f_c=0.0, f_d=f0, seed=seed)
    optical = QuadratureTrace.from_complex(z_o, 1.0 / fs, f_c=0.0, f_d=f0, seed=seed)
    return micro, optical


def expected_spectra(params: ConverterParams, chain: ChainNoise, omega):
    """Analytic two-sided spectra (S_ee, S_oo, S_oe) of the synthesized z records.

    S_oe = E[conj(Z_o) Z_e]; chain noise and excess are included.
    """
    xi = build_xi(params, omega).xi
    nv = bath_vector(params) + 0.5
    eps = params.epsilon
    xe, xo = xi[..., OUT_E, :], xi[..., OUT_F, :]
    s_ee = np.sum(np.abs(xe) ** 2 * nv, axis=-1) + 2 * chain.n_e - 0.5
    s_ee = s_ee + 2 * chain.excess_e * _excess_shape(params, np.asarray(omega))
    s_oo = eps * np.sum(np.abs(xo) ** 2 * nv, axis=-1) + 2 * chain.n_o - eps / 2
    s_oe = math.sqrt(eps) * np.sum(np.conj(xo) * xe * nv, axis=-1)
    return s_ee, s_oo, s_oe
