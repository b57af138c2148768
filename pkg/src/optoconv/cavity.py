"""Stand-alone cavity responses: one-port microwave reflection and the membrane-in-the-middle optical cavity.

The optical model is a 1-D plane-wave standing wave between two mirrors
with a thin lossless dielectric slab. Mirror transmissions are treated
perturbatively: the mode is solved with perfect mirrors and each mirror's
decay rate follows from the field energy next to it. Fields are carried as
(E, E'/k); in vacuum the energy per unit length is then constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

C_LIGHT = 299_792_458.0
OPTICAL_FREQUENCY = 281.8e12


@dataclass(frozen=True)
class OnePortCavity:
    kappa_int: float
    kappa_ex: float

    def __post_init__(self):
        if self.kappa_int < 0 or self.kappa_ex < 0:
            raise ValueError("linewidths must be >= 0")
        if self.kappa_int + self.kappa_ex <= 0:
            raise ValueError("total linewidth must be > 0")

    @property
    def kappa(self) -> float:
        return self.kappa_int + self.kappa_ex


def reflection(cav: OnePortCavity, delta):
    """S(Delta) = -(2i Delta + k_int - k_ex) / (2i Delta + k_int + k_ex)."""
    d = np.asarray(delta, dtype=float)
    s = -(2j * d + cav.kappa_int - cav.kappa_ex) / (2j * d + cav.kappa)
    return complex(s) if s.ndim == 0 else s


@dataclass(frozen=True)
class EtalonStack:
    t1: float = 98e-6  # front (input) mirror power transmission
    t2: float = 29e-6  # back mirror
    length: float = 2.6e-3
    thickness: float = 100e-9
    index: float = 2.0
    d0: float = 750e-6  # nominal front-mirror-to-membrane distance
    wavelength: float = C_LIGHT / OPTICAL_FREQUENCY

    def __post_init__(self):
        for name in ("t1", "t2"):
            if not 0 < getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.length <= 0 or self.thickness < 0 or self.index < 1 or self.wavelength <= 0:
            raise ValueError("invalid etalon geometry")

    @property
    def k0(self) -> float:
        return 2.0 * math.pi / self.wavelength

    def front_gap(self, x: float) -> float:
        d = self.d0 + x
        if d <= 0 or d + self.thickness >= self.length:
            raise ValueError(f"membrane at x={x:g} m lies outside the cavity")
        return d


@dataclass(frozen=True)
class EtalonPoint:
    kappa_ex_o: float  # front-mirror decay rate (rad/s)
    kappa_B_o: float  # back-mirror decay rate (rad/s)
    g_o: float  # d omega / dx (rad/s per m)
    back_gap: float


@dataclass(frozen=True)
class EtalonScan:
    x: np.ndarray
    kappa_ex_o: np.ndarray
    kappa_B_o: np.ndarray
    kappa_int_o: float
    g_o: np.ndarray

    @property
    def kappa_o(self) -> np.ndarray:
        return self.kappa_ex_o + self.kappa_B_o + self.kappa_int_o

    @property
    def g_o_norm(self) -> np.ndarray:
        m = np.max(np.abs(self.g_o))
        return np.zeros_like(self.g_o) if m == 0 else np.abs(self.g_o) / m


def _vacuum(ell, k):
    c, s = math.cos(k * ell), math.sin(k * ell)
    return np.array([[c, s], [-s, c]])


def _slab(ell, k, n):
    c, s = math.cos(n * k * ell), math.sin(n * k * ell)
    return np.array([[c, s / n], [-n * s, c]])


def _slab_energy(v0, ell, k, n):
    """Integral of n^2 E^2 + (E'/k)^2 across the slab for entry state v0."""
    if ell == 0:
        return 0.0
    e0, d0 = v0
    # inside: E = e0 cos(nkz) + (d0/n) sin(nkz), E'/k = -n e0 sin + d0 cos
    # n^2 E^2 + (E'/k)^2 = n^2 e0^2 + d0^2 is constant in z
    return (n * n * e0 * e0 + d0 * d0) * ell


def _membrane_exit(stack: EtalonStack, d: float, k: float) -> np.ndarray:
    v = _vacuum(d, k) @ np.array([0.0, 1.0])  # E(0) = 0, E'(0)/k = 1
    return _slab(stack.thickness, k, stack.index) @ v, v


def _back_gap(stack: EtalonStack, d: float, k: float) -> float:
    """Back-gap length that puts a field node on the back mirror at wavenumber k."""
    (e0, d0), _ = _membrane_exit(stack, d, k)
    base = math.atan2(-e0, d0) % math.pi / k
    nominal = stack.length - d - stack.thickness
    m = round((nominal - base) / (math.pi / k))
    return base + m * math.pi / k


def mode_energies(stack: EtalonStack, d: float, k: float, back_gap: float):
    """(energy/length at front mirror, at back mirror, total energy)."""
    exit_v, entry_v = _membrane_exit(stack, d, k)
    a1_sq = 1.0
    m_sq = float(exit_v @ exit_v)
    total = a1_sq * d + m_sq * back_gap + _slab_energy(entry_v, stack.thickness, k, stack.index)
    return a1_sq, m_sq, total


def etalon_point(stack: EtalonStack, x: float) -> EtalonPoint:
    """Decay rates and frequency pull at offset x, with the cavity held on resonance."""
    d = stack.front_gap(x)
    k = stack.k0
    lr = _back_gap(stack, d, k)
    a1, m2, u = mode_energies(stack, d, k, lr)
    omega = C_LIGHT * k
    kf = C_LIGHT * stack.t1 * a1 / (2.0 * u)
    kb = C_LIGHT * stack.t2 * m2 / (2.0 * u)
    # radiation-pressure form: the frequency pull follows the energy-density imbalance
    imbalance = a1 - m2
    if abs(imbalance) < 1e-12:  # rounding in the transfer matrices, e.g. an index-matched slab
        imbalance = 0.0
    g = -omega * imbalance / u
    return EtalonPoint(kappa_ex_o=kf, kappa_B_o=kb, g_o=g, back_gap=lr)


def _end_field(stack: EtalonStack, d: float, back_gap: float, k: float) -> float:
    exit_v, _ = _membrane_exit(stack, d, k)
    return float((_vacuum(back_gap, k) @ exit_v)[0])


def resonance_wavenumber(stack: EtalonStack, d: float, back_gap: float, k_guess: float) -> float:
    """Resonant k of the perfect-mirror cavity nearest ``k_guess``."""
    span = 0.25 * math.pi / (stack.length)
    f = lambda k: _end_field(stack, d, back_gap, k)
    return brentq(f, k_guess - span, k_guess + span, xtol=1e-16 * k_guess, rtol=1e-15)


def frequency_pull_fd(stack: EtalonStack, x: float, h: float = 1e-10) -> float:
    """d omega/dx by central differences, mirrors fixed, membrane displaced by +-h."""
    d = stack.front_gap(x)
    lr = _back_gap(stack, d, stack.k0)
    ks = [resonance_wavenumber(stack, d + s, lr - s, stack.k0) for s in (h, -h)]
    return C_LIGHT * (ks[0] - ks[1]) / (2.0 * h)


def fit_kappa_int(stack: EtalonStack, kappa_ex_target: float, kappa_total_target: float,
                  n_grid: int = 2001) -> float:
    """Constant internal loss giving ``kappa_total_target`` where kappa_ex,o hits its target.

    Searches one lambda/2 period; of the two crossings it takes the one with
    the smaller back-mirror rate.
    """
    xs = np.linspace(0.0, stack.wavelength / 2, n_grid)
    kf = np.array([etalon_point(stack, x).kappa_ex_o for x in xs]) - kappa_ex_target
    idx = np.nonzero(np.sign(kf[:-1]) != np.sign(kf[1:]))[0]
    if idx.size == 0:
        raise ValueError("front coupling never reaches the target over a period")
    best = None
    for i in idx:
        xc = brentq(lambda x: etalon_point(stack, x).kappa_ex_o - kappa_ex_target, xs[i], xs[i + 1])
        pt = etalon_point(stack, xc)
        if best is None or pt.kappa_B_o < best.kappa_B_o:
            best = pt
    k_int = kappa_total_target - best.kappa_ex_o - best.kappa_B_o
    if k_int < 0:
        raise ValueError("targets imply a negative internal loss")
    return k_int


def etalon_scan(stack: EtalonStack, x_grid, kappa_int: float = 0.0) -> EtalonScan:
    xs = np.asarray(x_grid, dtype=float)
    pts = [etalon_point(stack, float(x)) for x in xs]
    return EtalonScan(
        x=xs,
        kappa_ex_o=np.array([p.kappa_ex_o for p in pts]),
        kappa_B_o=np.array([p.kappa_B_o for p in pts]),
        kappa_int_o=float(kappa_int),
        g_o=np.array([p.g_o for p in pts]),
    )
