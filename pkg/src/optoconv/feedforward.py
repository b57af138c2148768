"""Classical feedforward of the microwave record onto the optical output.

All spectra are single-quadrature photon numbers as measured, i.e. they
include the chain backgrounds n_e, n_o (vacuum plus added noise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlations import QuadratureSpectra
from .dsp.traces import QuadratureTrace

VACUUM_QUADRATURE = 0.5


@dataclass(frozen=True)
class FeedforwardConfig:
    w: float
    n_e: float
    n_o: float
    gain_a: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.w):
            raise ValueError(f"w must be finite, got {self.w}")
        for name in ("n_e", "n_o"):
            v = getattr(self, name)
            if not v >= VACUUM_QUADRATURE - 1e-12:
                raise ValueError(f"{name} must be >= 1/2 (single-quadrature vacuum), got {v}")

    @property
    def scale(self) -> float:
        """sqrt(n_o/n_e), converting microwave units to optical units."""
        return math.sqrt(self.n_o / self.n_e)

    def with_w(self, w: float) -> "FeedforwardConfig":
        return FeedforwardConfig(w=w, n_e=self.n_e, n_o=self.n_o, gain_a=self.gain_a, eta=self.eta)


@dataclass(frozen=True)
class NoiseBudget:
    x_oo: float | np.ndarray
    y_oo: float | np.ndarray
    x_ee: float | np.ndarray
    y_ee: float | np.ndarray
    x_eo: float | np.ndarray
    y_eo: float | np.ndarray
    omega: float | np.ndarray | None = None


def budget_from_spectra(spec: QuadratureSpectra, n_e: float, n_o: float,
                        excess_e=0.0) -> NoiseBudget:
    """Add chain backgrounds (and microwave excess) to converter-referred spectra."""
    x_ee = spec.x_ee + n_e + excess_e
    x_oo = spec.x_oo + n_o
    return NoiseBudget(x_oo=x_oo, y_oo=x_oo, x_ee=x_ee, y_ee=x_ee,
                       x_eo=spec.x_eo, y_eo=spec.y_eo, omega=spec.omega)


def ff_spectrum(budget: NoiseBudget, cfg: FeedforwardConfig):
    """Fed-forward optical spectra (x_check, y_check)."""
    if cfg.n_e <= 0:
        raise ValueError("n_e must be > 0")
    r = cfg.n_o / cfg.n_e
    s = math.sqrt(r)
    w = cfg.w
    x = budget.x_oo + w * w * r * budget.x_ee - 2.0 * w * s * budget.x_eo
    y = budget.y_oo + w * w * r * budget.y_ee - 2.0 * w * s * budget.y_eo
    return x, y


def optimal_weight(budget: NoiseBudget, cfg: FeedforwardConfig, quadrature: str = "x"):
    """Minimizer of the fed-forward spectrum.

    ``quadrature`` selects X only, or "total" to minimize X + Y jointly.
    """
    if quadrature == "x":
        num, den = budget.x_eo, budget.x_ee
    elif quadrature == "total":
        num, den = np.add(budget.x_eo, budget.y_eo), np.add(budget.x_ee, budget.y_ee)
    else:
        raise ValueError(f"quadrature must be 'x' or 'total', got {quadrature!r}")
    den = np.asarray(den, dtype=float)
    if np.any(den <= 0):
        raise ValueError("microwave spectrum must be positive to define an optimal weight")
    w = math.sqrt(cfg.n_e / cfg.n_o) * np.asarray(num, dtype=float) / den
    return float(w) if w.ndim == 0 else w


def n_add_input_referred(x_check_peak, background, cfg: FeedforwardConfig):
    """Excess output noise over the measurement floor, divided by gain_a * eta.

    Both arguments must use the same quadrature convention (e.g. the X+Y
    total with ``background = 2 n_o``).
    """
    apparent = cfg.gain_a * cfg.eta
    if not apparent > 0:
        raise ValueError("gain_a * eta must be > 0 to refer noise to the input")
    return (np.asarray(x_check_peak) - background) / apparent


def weight_sweep(budget: NoiseBudget, cfg: FeedforwardConfig, w_grid):
    """x_check and y_check for each weight in ``w_grid`` (rows follow w)."""
    xs, ys = [], []
    for w in w_grid:
        x, y = ff_spectrum(budget, cfg.with_w(float(w)))
        xs.append(x)
        ys.append(y)
    return np.asarray(xs), np.asarray(ys)


def ff_timeseries(optical: QuadratureTrace, microwave: QuadratureTrace,
                  cfg: FeedforwardConfig) -> QuadratureTrace:
    """q_o - w sqrt(n_o/n_e) q_e, and likewise for p."""
    if optical.q.shape != microwave.q.shape:
        raise ValueError(f"trace lengths differ: {optical.q.size} vs {microwave.q.size}")
    if not math.isclose(optical.dt, microwave.dt, rel_tol=1e-12):
        raise ValueError("traces have different sample intervals")
    k = cfg.w * cfg.scale
    return QuadratureTrace(q=optical.q - k * microwave.q, p=optical.p - k * microwave.p,
                           dt=optical.dt, f_c=optical.f_c, f_d=optical.f_d, seed=optical.seed)
