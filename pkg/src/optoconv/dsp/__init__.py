"""Measurement-chain emulation: synthesis, demodulation, spectra and calibration fits."""

from .fitting import (CalibrationFit, FitError, LorentzianFit, bath_temperature, hemt_fit,
                      hemt_model, lorentzian, lorentzian_fit, thermal_peak_model,
                      thermal_sweep_fit)
from .pipeline import CorrelationMeasurement, measure_correlations
from .spectra import QuadratureSpectra, complex_spectrum, quadrature_spectra
from .synthesis import ChainNoise, Tone, demod_frequency, expected_spectra, synthesize_outputs
from .traces import (QuadratureTrace, align_phase, analytic_demodulate, complex_equivalent,
                     narrowband)

__all__ = [
    "CalibrationFit", "ChainNoise", "CorrelationMeasurement", "FitError", "LorentzianFit",
    "QuadratureSpectra", "QuadratureTrace", "Tone", "align_phase", "analytic_demodulate",
    "bath_temperature", "complex_equivalent", "complex_spectrum", "demod_frequency",
    "expected_spectra", "hemt_fit", "hemt_model", "lorentzian", "lorentzian_fit",
    "measure_correlations", "narrowband", "quadrature_spectra", "synthesize_outputs",
    "thermal_peak_model", "thermal_sweep_fit",
]
