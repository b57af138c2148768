"""Shift-code qubit transfer through a Gaussian X-displacement channel.

Codewords are X eigenstates |+-b>. The syndrome measurement A_b = f_b(X)
reads off the displacement, so with X-eigenstate codewords the whole
channel-plus-decoder pipeline reduces to a classical success indicator per
sampled shift beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.stats import norm

DECODERS = ("ideal_fb", "cubic")
MIN_SAMPLES = 1000


@dataclass(frozen=True)
class ShiftCodeParams:
    b: float
    sigma_x: float
    decoder: str = "ideal_fb"
    n_samples: int = 1_000_000
    # cubic decoder: residual |beta - gamma| counted as success below this;
    # None uses the logical criterion |beta - gamma| < b
    tolerance: float | None = None

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"b must be > 0, got {self.b}")
        if not self.sigma_x > 0:
            raise ValueError(f"sigma_x must be > 0, got {self.sigma_x}")
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}, got {self.decoder!r}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")


@dataclass(frozen=True)
class DecoderResult:
    f_ent_estimate: float
    f_ent_bound: float
    failure_rate: float
    stderr: float
    n_samples: int


def f_b(x, b: float):
    """Shift read-out: x - b on (0, 2b], x + b on [-2b, 0), 0 beyond; f_b(0) = -b."""
    x = np.asarray(x, dtype=float)
    out = np.where(x > 0, x - b, x + b)
    out = np.where(x == 0, -b, out)
    out = np.where(np.abs(x) > 2 * b, 0.0, out)
    return float(out) if out.ndim == 0 else out


def f_b_cubic(x, b: float):
    """Smooth proxy x^3/(2 b^2) - x/2, with roots at 0 and +-b."""
    x = np.asarray(x, dtype=float)
    out = x**3 / (2 * b * b) - 0.5 * x
    return float(out) if out.ndim == 0 else out


def cubic_residual(gamma, b: float):
    """f_b_cubic(b + gamma) - gamma = 3 gamma^2/(2b) + gamma^3/(2b^2)."""
    g = np.asarray(gamma, dtype=float)
    return 1.5 * g * g / b + 0.5 * g**3 / (b * b)


def fidelity_bound(b: float, sigma_x: float) -> float:
    """Probability mass of |beta| < b, by quadrature (equals erf(b / (sqrt 2 sigma)))."""
    val, _ = quad(lambda x: norm.pdf(x, scale=sigma_x), -b, b, epsabs=1e-14, epsrel=1e-13)
    return float(val)


def _success(beta, codeword: float, p: ShiftCodeParams):
    x = codeword + beta
    if p.decoder == "ideal_fb":
        gamma = f_b(x, p.b)
        # the ideal read-out returns beta exactly when it stays on the right branch
        return np.abs(gamma - beta) < 1e-9 * p.b
    gamma = f_b_cubic(x, p.b)
    tol = p.b if p.tolerance is None else p.tolerance
    return np.abs(beta - gamma) < tol


def simulate_fidelity(params: ShiftCodeParams, seed: int) -> DecoderResult:
    """Monte-Carlo entanglement fidelity over beta ~ N(0, sigma_x^2).

    Both codewords are sampled with equal weight; a trial contributes 1 only
    if the decoded shift returns the codeword to itself.
    """
    n = int(params.n_samples)
    if n < MIN_SAMPLES:
        raise ValueError(f"n_samples must be >= {MIN_SAMPLES}, got {n}")
    rng = np.random.default_rng(seed)
    beta = rng.normal(0.0, params.sigma_x, size=n)
    word = np.where(rng.random(n) < 0.5, params.b, -params.b)
    ok = np.empty(n, dtype=bool)
    for sign in (1.0, -1.0):
        m = word == sign * params.b
        ok[m] = _success(beta[m], sign * params.b, params)
    p_hat = float(ok.mean())
    se = math.sqrt(max(p_hat * (1 - p_hat), 1.0 / n) / n)
    return DecoderResult(f_ent_estimate=p_hat, f_ent_bound=fidelity_bound(params.b, params.sigma_x),
                         failure_rate=1.0 - p_hat, stderr=se, n_samples=n)
