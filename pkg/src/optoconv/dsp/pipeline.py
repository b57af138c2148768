"""End-to-end analysis of a synthesized (or recorded) pair of output traces."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fitting import LorentzianFit, lorentzian_fit
from .spectra import QuadratureSpectra, quadrature_spectra
from .traces import QuadratureTrace, align_phase


@dataclass(frozen=True)
class CorrelationMeasurement:
    spectra: QuadratureSpectra
    fit_e: LorentzianFit
    fit_o: LorentzianFit
    fit_eo: LorentzianFit
    phase: float

    @property
    def residual(self) -> float:
        """Cross peak minus the geometric mean of the two auto peaks."""
        return self.fit_eo.height - math.sqrt(self.fit_e.height * self.fit_o.height)

    @property
    def residual_err(self) -> float:
        he, ho = self.fit_e.height, self.fit_o.height
        se, so, sx = self.fit_e.stderr[2], self.fit_o.stderr[2], self.fit_eo.stderr[2]
        g = math.sqrt(he * ho)
        return math.sqrt(sx**2 + (0.5 * g / he * se) ** 2 + (0.5 * g / ho * so) ** 2)


def measure_correlations(microwave: QuadratureTrace, optical: QuadratureTrace,
                         nperseg: int, fit_span: float) -> CorrelationMeasurement:
    """Align demod phases, estimate spectra, and fit the three peaks.

    X and Y carry the same statistics, so each fit uses their average.
    Only offsets within +-``fit_span`` Hz enter the fits.
    """
    micro, phi = align_phase(optical, microwave)
    sp = quadrature_spectra(micro, optical, nperseg=nperseg)
    band = sp.band(-fit_span, fit_span)
    f = sp.freq[band]
    fits = []
    for a, b in ((sp.x, sp.y), (sp.x_other, sp.y_other), (sp.x_cross, sp.y_cross)):
        avg = 0.5 * (a + b)[band]
        fits.append(lorentzian_fit(f, avg))
    return CorrelationMeasurement(sp, fits[0], fits[1], fits[2], phi)
