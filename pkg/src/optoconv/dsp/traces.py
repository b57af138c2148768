"""Demodulated quadrature records and the complex-envelope helpers around them.

Traces are photon-flux normalized: with z = q + i p, the periodogram
|FFT(z)|^2 / (N fs) is the two-sided spectrum in photons, and |FFT(q)|^2 /
(N fs) is the single-quadrature spectrum <X^2>.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import hilbert


@dataclass(frozen=True)
class QuadratureTrace:
    q: np.ndarray
    p: np.ndarray
    dt: float
    f_c: float = 0.0  # carrier (Hz); 0 means the pump-rotating frame
    f_d: float = 0.0  # demodulation frequency (Hz), f_c + f_m by convention
    seed: int | None = None

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if q.ndim != 1 or q.shape != p.shape:
            raise ValueError(f"q and p must be 1-D with equal length, got {q.shape} and {p.shape}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def fs(self) -> float:
        return 1.0 / self.dt

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.n) * self.dt

    @property
    def z(self) -> np.ndarray:
        return self.q + 1j * self.p

    @classmethod
    def from_complex(cls, z, dt, f_c=0.0, f_d=0.0, seed=None) -> "QuadratureTrace":
        z = np.asarray(z)
        return cls(q=z.real.copy(), p=z.imag.copy(), dt=dt, f_c=f_c, f_d=f_d, seed=seed)

    def rotated(self, phi: float) -> "QuadratureTrace":
        """Shift the demodulation phase: z -> z exp(-i phi)."""
        return QuadratureTrace.from_complex(self.z * np.exp(-1j * phi), self.dt,
                                            self.f_c, self.f_d, self.seed)

    def _meta(self) -> dict:
        return {"dt": self.dt, "f_c": self.f_c, "f_d": self.f_d, "seed": self.seed}

    def save(self, path: str | Path) -> None:
        """Write ``.npz`` (binary) or ``.csv`` (header carries the metadata)."""
        path = Path(path)
        if path.suffix == ".npz":
            np.savez(path, q=self.q, p=self.p, meta=json.dumps(self._meta()))
        elif path.suffix == ".csv":
            buf = io.StringIO()
            buf.write(f"# {json.dumps(self._meta(), sort_keys=True)}\n")
            buf.write("q,p\n")
            np.savetxt(buf, np.column_stack([self.q, self.p]), delimiter=",", fmt="%.17g")
            path.write_text(buf.getvalue())
        else:
            raise ValueError(f"unsupported trace format {path.suffix!r} (use .npz or .csv)")

    @classmethod
    def load(cls, path: str | Path) -> "QuadratureTrace":
        path = Path(path)
        if path.suffix == ".npz":
            with np.load(path) as f:
                meta = json.loads(str(f["meta"]))
                return cls(q=f["q"], p=f["p"], **meta)
        if path.suffix == ".csv":
            with path.open() as fh:
                first = fh.readline()
                if not first.startswith("#"):
                    raise ValueError(f"{path}: missing metadata header line")
                meta = json.loads(first[1:])
                data = np.loadtxt(fh, delimiter=",", skiprows=1, ndmin=2)
            return cls(q=data[:, 0], p=data[:, 1], **meta)
        raise ValueError(f"unsupported trace format {path.suffix!r} (use .npz or .csv)")


def complex_equivalent(trace: QuadratureTrace) -> np.ndarray:
    """a(t) = (q + i p) exp(i 2 pi f_d t), referenced to the carrier frame."""
    return trace.z * np.exp(2j * np.pi * trace.f_d * trace.t)


def analytic_demodulate(s, dt: float, f_d: float, f_c: float = 0.0,
                        seed: int | None = None) -> QuadratureTrace:
    """Heterodyne a real record: analytic signal, then shift down by f_d.

    The analytic signal has twice the positive-frequency amplitude, so the
    result is scaled by 1/sqrt(2) to keep the photon normalization of a
    record whose two-sided spectrum is split evenly.
    """
    a = hilbert(np.asarray(s, dtype=float))
    t = np.arange(a.size) * dt
    z = a * np.exp(-2j * np.pi * f_d * t) / math.sqrt(2.0)
    return QuadratureTrace.from_complex(z, dt, f_c=f_c, f_d=f_d, seed=seed)


def narrowband(trace: QuadratureTrace, bandwidth: float, offset: float = 0.0) -> QuadratureTrace:
    """Brick-wall filter of total width ``bandwidth`` (Hz) around ``offset``.

    The output is re-centred on ``offset`` and divided by sqrt(bandwidth),
    so Var(q) equals the mean single-quadrature spectrum inside the band.
    """
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be > 0, got {bandwidth}")
    n = trace.n
    freqs = np.fft.fftfreq(n, trace.dt)
    if bandwidth < 2 * trace.fs / n:
        raise ValueError("bandwidth is below the record's frequency resolution")
    z = trace.z * np.exp(-2j * np.pi * offset * trace.t)
    spec = np.fft.fft(z)
    spec[np.abs(freqs) > bandwidth / 2] = 0.0
    zf = np.fft.ifft(spec) / math.sqrt(bandwidth)
    return QuadratureTrace.from_complex(zf, trace.dt, trace.f_c, trace.f_d + offset, trace.seed)


def align_phase(reference: QuadratureTrace, other: QuadratureTrace) -> tuple[QuadratureTrace, float]:
    """Rotate ``other`` so its correlation with ``reference`` is real and positive.

    Mimics adjusting the demodulator phase; returns (rotated trace, phase).
    """
    phi = float(np.angle(np.vdot(reference.z, other.z)))
    return other.rotated(phi), phi
